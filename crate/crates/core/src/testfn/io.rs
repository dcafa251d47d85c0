//! Self-describing grid dumps of test functions: JSON, or a little-endian
//! binary layout
//!
//! ```text
//! b"DS2TFN\0\x01" | u32 n_theta | u32 n_tau | f64 r, tau_min, tau_max, delta
//! | u8 is_real | (f64 re, f64 im) * n_tau * n_theta, row-major in tau
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::function::TestFunction;
use super::generator::Generator;
use super::grid::GridSpec;

const MAGIC: &[u8; 8] = b"DS2TFN\0\x01";

#[derive(Serialize, Deserialize)]
struct Dump {
    grid: GridSpec,
    is_real: bool,
    /// `[re, im]` pairs, row-major in `tau`.
    values: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<Generator>,
}

fn rebuild(grid: GridSpec, values: Vec<Complex64>, generator: Option<Generator>) -> Result<TestFunction> {
    let grid = GridSpec::new(grid.r, grid.n_theta, grid.n_tau, grid.tau_min, grid.tau_max, grid.delta)?;
    let f = TestFunction::from_values(&grid, values)?;
    match generator {
        // a generator is kept only if it reproduces the stored samples
        Some(gen) => {
            let g = TestFunction::from_generator(&grid, gen)?;
            if g.max_diff(&f)? > 1e-12 * f.max_abs().max(1.0) {
                return Err(Error::Serialization("generator does not match stored values".into()));
            }
            Ok(g)
        }
        None => Ok(f),
    }
}

pub fn to_json(f: &TestFunction) -> Result<String> {
    let dump = Dump {
        grid: *f.grid(),
        is_real: f.is_real(),
        values: f.values().iter().map(|v| [v.re, v.im]).collect(),
        generator: f.generator().cloned(),
    };
    serde_json::to_string(&dump).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn from_json(s: &str) -> Result<TestFunction> {
    let d: Dump = serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
    rebuild(d.grid, d.values.into_iter().map(|[a, b]| Complex64::new(a, b)).collect(), d.generator)
}

pub fn to_bytes(f: &TestFunction) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(49 + 16 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.n_theta as u32).to_le_bytes());
    out.extend_from_slice(&(g.n_tau as u32).to_le_bytes());
    for x in [g.r, g.tau_min, g.tau_max, g.delta] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out.push(f.is_real() as u8);
    for v in f.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn from_bytes(b: &[u8]) -> Result<TestFunction> {
    let bad = |m: &str| Error::Serialization(m.to_string());
    if b.len() < 49 || &b[..8] != MAGIC {
        return Err(bad("not a test-function dump"));
    }
    let u32_at = |i: usize| u32::from_le_bytes(b[i..i + 4].try_into().expect("4 bytes")) as usize;
    let f64_at = |i: usize| f64::from_le_bytes(b[i..i + 8].try_into().expect("8 bytes"));
    let (nq, nt) = (u32_at(8), u32_at(12));
    let grid =
        GridSpec { r: f64_at(16), tau_min: f64_at(24), tau_max: f64_at(32), delta: f64_at(40), n_theta: nq, n_tau: nt };
    let n = nq.checked_mul(nt).ok_or_else(|| bad("grid too large"))?;
    if b.len() != 49 + 16 * n {
        return Err(bad("truncated value block"));
    }
    let values = (0..n).map(|i| Complex64::new(f64_at(49 + 16 * i), f64_at(57 + 16 * i))).collect();
    let f = rebuild(grid, values, None)?;
    if b[48] == 1 && !f.is_real() {
        return Err(bad("real flag set on complex data"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DsParams, DsPoint};
    use crate::testfn::function::bump;
    use crate::testfn::grid::Resolution;

    fn f() -> TestFunction {
        let g = GridSpec::standard(1.5, Resolution::Half).unwrap();
        let p = DsPoint::from_conformal(0.1, 2.0, &DsParams::new(1.5).unwrap()).unwrap();
        bump(&g, &p, (0.6, 1.5), Complex64::new(0.5, -0.25)).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let f = f();
        let back = from_json(&to_json(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn binary_round_trip() {
        let f = f();
        let bytes = to_bytes(&f);
        let back = from_bytes(&bytes).unwrap();
        assert_eq!(back.values(), f.values());
        assert_eq!(back.grid(), f.grid());
        assert!(from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(from_bytes(&bad).is_err());
    }

    #[test]
    fn rejects_values_in_margin() {
        let f = f();
        let mut d: serde_json::Value = serde_json::from_str(&to_json(&f).unwrap()).unwrap();
        d["values"][0] = serde_json::json!([1.0, 0.0]);
        d.as_object_mut().unwrap().remove("generator");
        assert!(matches!(from_json(&d.to_string()), Err(Error::SupportEscape { .. })));
    }
}
