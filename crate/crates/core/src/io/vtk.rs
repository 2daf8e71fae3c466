//! Legacy ASCII VTK `STRUCTURED_POINTS` output of `n`, `φ` and `v`.

use std::fmt::Write as _;
use std::path::Path;

use crate::grid::{FieldState, GridSpec, ScalarField, VectorField};
use crate::{Error, Result};

/// Points sit at cell centers, x fastest.
pub fn to_string(state: &FieldState) -> String {
    let g = state.grid();
    let h = g.spacing();
    let mut s = String::with_capacity(80 * g.len());
    s.push_str("# vtk DataFile Version 3.0\nlcdo fields\nASCII\nDATASET STRUCTURED_POINTS\n");
    let _ = writeln!(s, "DIMENSIONS {} {} {}", g.dims[0], g.dims[1], g.dims[2]);
    let o = g.center(0);
    let _ = writeln!(s, "ORIGIN {} {} {}", o[0], o[1], o[2]);
    let _ = writeln!(s, "SPACING {} {} {}", h[0], h[1], h[2]);
    let _ = writeln!(s, "POINT_DATA {}", g.len());
    s.push_str("VECTORS n double\n");
    for x in &state.n.data {
        let _ = writeln!(s, "{} {} {}", x[0], x[1], x[2]);
    }
    for (name, f) in [("phi", &state.phi), ("v", &state.v)] {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for x in &f.data {
            let _ = writeln!(s, "{x}");
        }
    }
    s
}

pub fn write(path: &Path, state: &FieldState) -> Result<()> {
    std::fs::write(path, to_string(state))?;
    Ok(())
}

/// Reads files produced by [`to_string`].
pub fn parse(text: &str) -> Result<FieldState> {
    let bad = |m: String| Error::Format(format!("vtk: {m}"));
    let mut lines = text.lines();
    let mut header = |prefix: &str| -> Result<Vec<String>> {
        loop {
            let l = lines.next().ok_or_else(|| bad(format!("missing {prefix}")))?;
            if let Some(rest) = l.strip_prefix(prefix) {
                return Ok(rest.split_whitespace().map(String::from).collect());
            }
        }
    };
    let nums = |v: Vec<String>| -> Result<Vec<f64>> { v.iter().map(|x| x.parse().map_err(|_| bad(format!("number `{x}`")))).collect() };
    let dims = nums(header("DIMENSIONS")?)?;
    let _origin = header("ORIGIN")?;
    let spacing = nums(header("SPACING")?)?;
    if dims.len() != 3 || spacing.len() != 3 {
        return Err(bad("bad DIMENSIONS/SPACING".into()));
    }
    let d = [dims[0] as usize, dims[1] as usize, dims[2] as usize];
    let grid = GridSpec::new(d, [spacing[0] * d[0] as f64, spacing[1] * d[1] as f64, spacing[2] * d[2] as f64])?;
    header("VECTORS n")?;
    let mut read = |count: usize| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let l = lines.next().ok_or_else(|| bad("truncated data".into()))?;
            if l.starts_with("SCALARS") || l.starts_with("LOOKUP_TABLE") {
                continue;
            }
            for x in l.split_whitespace() {
                out.push(x.parse().map_err(|_| bad(format!("number `{x}`")))?);
            }
        }
        Ok(out)
    };
    let n = read(3 * grid.len())?;
    let phi = read(grid.len())?;
    let v = read(grid.len())?;
    Ok(FieldState {
        n: VectorField::from_vec(grid, n.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())?,
        phi: ScalarField::from_vec(grid, phi)?,
        v: ScalarField::from_vec(grid, v)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init::{random_director, smoothed_ball};

    #[test]
    fn structured_points_round_trip() {
        let grid = GridSpec::new([8, 9, 10], [1.0, 1.5, 2.0]).unwrap();
        let state = FieldState::new(
            random_director(grid, 1),
            smoothed_ball(grid, 0.4, [0.0; 3], 0.1),
            ScalarField::constant(grid, 1.0),
        )
        .unwrap();
        let text = to_string(&state);
        assert!(text.contains("DATASET STRUCTURED_POINTS\nDIMENSIONS 8 9 10\n"));
        assert_eq!(text.matches("SCALARS").count(), 2);
        assert_eq!(parse(&text).unwrap().phi, state.phi);
        assert_eq!(parse(&text).unwrap().n.data, state.n.data);
    }
}
