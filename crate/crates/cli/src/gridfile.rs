//! Binary lattice files.
//!
//! Layout (all little-endian):
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `PWFN` |
//! | 2 | version (u16, currently 1) |
//! | 12 | dims n_x, n_y, n_z (u32) |
//! | 24 | box lengths L_x, L_y, L_z (f64) |
//! | 2 | components per site (u16) |
//! | 16·c·N | payload: (re, im) f64 pairs, sites row-major with z fastest, components innermost |

use field_core::{Vec3C, C64};
use spectral::{GridSpec, SixField};

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"PWFN";
pub const VERSION: u16 = 1;
pub const HEADER_BYTES: usize = 4 + 2 + 12 + 24 + 2;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub dims: [u32; 3],
    pub lengths: [f64; 3],
    pub components: u16,
    /// `components` values per site, sites in grid order.
    pub data: Vec<C64>,
}

impl GridFile {
    pub fn sites(&self) -> usize {
        self.dims.iter().map(|&d| d as usize).product()
    }

    pub fn grid(&self) -> CliResult<GridSpec> {
        GridSpec::new(self.dims.map(|d| d as usize), self.lengths).map_err(|e| CliError::Format(format!("grid header: {e}")))
    }

    pub fn from_components(spec: &GridSpec, components: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(spec.len() * components);
        for s in 0..spec.len() {
            for c in 0..components {
                data.push(f(s, c));
            }
        }
        GridFile { dims: spec.n.map(|d| d as u32), lengths: spec.length, components: components as u16, data }
    }

    pub fn from_six(field: &SixField) -> Self {
        GridFile::from_components(&field.spec, 6, |s, c| {
            let v = &field.data[s];
            if c < 3 {
                v.upper[c]
            } else {
                v.lower[c - 3]
            }
        })
    }

    pub fn from_vec3(spec: &GridSpec, v: &[Vec3C]) -> Self {
        GridFile::from_components(spec, 3, |s, c| v[s][c])
    }

    pub fn from_real(spec: &GridSpec, columns: &[&[f64]]) -> Self {
        GridFile::from_components(spec, columns.len(), |s, c| C64::new(columns[c][s], 0.0))
    }

    pub fn component(&self, site: usize, c: usize) -> C64 {
        self.data[site * self.components as usize + c]
    }

    /// Six components become a six-field; three become the upper block with a zero lower block.
    pub fn to_six(&self) -> CliResult<SixField> {
        let spec = self.grid()?;
        let blk = |off: usize| -> Vec<Vec3C> {
            (0..spec.len()).map(|s| Vec3C::from_fn(|c, _| self.component(s, off + c))).collect()
        };
        match self.components {
            6 => Ok(SixField::from_blocks(spec, &blk(0), &blk(3)).expect("lengths follow the grid")),
            3 => Ok(SixField::from_blocks(spec, &blk(0), &vec![Vec3C::zeros(); spec.len()]).expect("lengths follow the grid")),
            n => Err(CliError::Format(format!("expected 3 or 6 components for a field, found {n}"))),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_BYTES + 16 * self.data.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for d in self.dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for l in self.lengths {
            out.extend_from_slice(&l.to_le_bytes());
        }
        out.extend_from_slice(&self.components.to_le_bytes());
        for z in &self.data {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> CliResult<Self> {
        if bytes.len() < HEADER_BYTES {
            return Err(CliError::Format(format!("file has {} bytes, shorter than the {HEADER_BYTES}-byte header", bytes.len())));
        }
        if &bytes[0..4] != MAGIC {
            return Err(CliError::Format(format!("bad magic {:?}, expected \"PWFN\"", String::from_utf8_lossy(&bytes[0..4]))));
        }
        let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let version = u16_at(4);
        if version != VERSION {
            return Err(CliError::Format(format!("unsupported version {version} (this build reads version {VERSION})")));
        }
        let dims = [u32_at(6), u32_at(10), u32_at(14)];
        let lengths = [f64_at(18), f64_at(26), f64_at(34)];
        let components = u16_at(42);
        let sites = dims.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d as u64));
        let expected = sites
            .and_then(|s| s.checked_mul(16 * components as u64))
            .ok_or_else(|| CliError::Format("header dimensions overflow".into()))?;
        let found = (bytes.len() - HEADER_BYTES) as u64;
        if found != expected {
            return Err(CliError::Format(format!("payload has {found} bytes, expected {expected}")));
        }
        let data = bytes[HEADER_BYTES..]
            .chunks_exact(16)
            .map(|c| {
                C64::new(
                    f64::from_le_bytes(c[0..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..16].try_into().expect("8 bytes")),
                )
            })
            .collect();
        Ok(GridFile { dims, lengths, components, data })
    }

    pub fn read(path: &std::path::Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        GridFile::decode(&bytes).map_err(|e| match e {
            CliError::Format(m) => CliError::Format(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridFile {
        let spec = GridSpec::new([2, 4, 6], [1.0, 2.0, 3.5]).unwrap();
        GridFile::from_components(&spec, 2, |s, c| C64::new(s as f64 + 0.25, -(c as f64) * 1e-300))
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let f = sample();
        let b = f.encode();
        assert_eq!(b.len(), HEADER_BYTES + 16 * 2 * 48);
        let g = GridFile::decode(&b).unwrap();
        assert_eq!(g, f);
        assert_eq!(g.encode(), b);
    }

    #[test]
    fn malformed_files_are_format_errors() {
        let mut b = sample().encode();
        b.truncate(b.len() - 5);
        let e = GridFile::decode(&b).unwrap_err();
        assert_eq!(e, CliError::Format(format!("payload has {} bytes, expected {}", 16 * 96 - 5, 16 * 96)));
        let mut b = sample().encode();
        b[0] = b'X';
        assert!(GridFile::decode(&b).unwrap_err().to_string().contains("magic"));
        let mut b = sample().encode();
        b[4] = 2;
        assert!(GridFile::decode(&b).unwrap_err().to_string().contains("version 2"));
        assert!(matches!(GridFile::decode(b"PWFN"), Err(CliError::Format(_))));
    }

    #[test]
    fn six_fields_round_trip() {
        let spec = GridSpec::cubic(2, 1.0).unwrap();
        let f = SixField::from_fn(spec, |i| {
            let v = Vec3C::new(C64::new(i as f64, 1.0), C64::new(0.0, -2.0), C64::new(0.5, 0.0));
            field_core::SixVector::new(v, v * C64::new(0.0, 1.0))
        });
        assert_eq!(GridFile::from_six(&f).to_six().unwrap(), f);
    }
}
