//! Counting rescaled lattice points in limit balls.

use crate::dilation::{limit_law, DilationStructure};
use crate::error::{Error, Result};
use crate::geometry::HomNorm;
use crate::group::GroupLaw;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct BallCountRow {
    pub t: f64,
    pub count: f64,
    /// count * det(delta_{1/t})
    pub scaled: f64,
    pub volume: f64,
    pub rel_err: f64,
}

/// Integers k with lo < k / s < hi.
fn count_open(lo: f64, hi: f64, s: f64) -> (i64, i64) {
    let (a, b) = (lo * s, hi * s);
    (a.floor() as i64 + 1, b.ceil() as i64 - 1)
}

/// m_t(B(x, r) cap Gamma_t) against m(B(x, r)) for Gamma = Z^d, balls of the
/// limit law and the max-type homogeneous norm.
pub fn ball_count_convergence(
    law: &GroupLaw,
    d: &DilationStructure,
    x: &[f64],
    r: f64,
    ts: &[f64],
    max_columns: usize,
) -> Result<Vec<BallCountRow>> {
    let lim = limit_law(law, d)?;
    let lim = lim.limit.ok_or_else(|| Error::Inadmissible("ball counting needs an admissible dilation".into()))?;
    let dim = law.dim();
    if x.len() != dim {
        return Err(Error::Dimension { expected: dim, got: x.len() });
    }
    let norm = HomNorm::from_dilation(d);
    let h = norm.ball_half_widths(r);
    let volume = norm.ball_volume(r);
    let mut xinv = vec![0.0; dim];
    lim.inv_f64(x, &mut xinv);
    let at_identity = x.iter().all(|&v| v == 0.0);
    let mut rows = Vec::new();
    for &t in ts {
        let fac = d.factors(t);
        let count = if at_identity {
            fac.iter()
                .zip(&h)
                .map(|(f, hh)| {
                    let (a, b) = count_open(-hh, *hh, *f);
                    (b - a + 1).max(0) as f64
                })
                .product()
        } else {
            let mut y = vec![0.0; dim];
            let mut budget = max_columns;
            count_level(&lim, &xinv, &h, &fac, 0, &mut y, &mut budget)?
        };
        let scaled = count / d.det(t);
        rows.push(BallCountRow { t, count, scaled, volume, rel_err: (scaled - volume).abs() / volume });
    }
    Ok(rows)
}

fn count_level(
    lim: &GroupLaw,
    xinv: &[f64],
    h: &[f64],
    fac: &[f64],
    i: usize,
    y: &mut Vec<f64>,
    budget: &mut usize,
) -> Result<f64> {
    let dim = y.len();
    let mut z0 = vec![0.0; dim];
    let mut z1 = vec![0.0; dim];
    y[i] = 0.0;
    lim.mul_f64(xinv, y, &mut z0);
    y[i] = 1.0;
    lim.mul_f64(xinv, y, &mut z1);
    y[i] = 0.0;
    let slope = z1[i] - z0[i];
    if (slope - 1.0).abs() > 1e-9 {
        return Err(Error::Unsupported("ball counting needs a triangular limit law".into()));
    }
    // |z0_i + y_i| < h_i
    let (a, b) = count_open(-h[i] - z0[i], h[i] - z0[i], fac[i]);
    if b < a {
        return Ok(0.0);
    }
    if i + 1 == dim {
        return Ok((b - a + 1) as f64);
    }
    if *budget < (b - a + 1) as usize {
        return Err(Error::Budget("ball enumeration exceeds the column budget".into()));
    }
    *budget -= (b - a + 1) as usize;
    let mut total = 0.0;
    for k in a..=b {
        y[i] = k as f64 / fac[i];
        total += count_level(lim, xinv, h, fac, i + 1, y, budget)?;
    }
    y[i] = 0.0;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{abelian, h3_matrix};

    #[test]
    fn abelian_unit_ball() {
        let d = DilationStructure::from_ints(&[1, 1]);
        let rows = ball_count_convergence(&abelian(2), &d, &[0.0, 0.0], 1.0, &[10.0, 1000.0], 1 << 20).unwrap();
        // (2t - 1)^2 / t^2
        assert!((rows[0].scaled - 3.61).abs() < 1e-12);
        assert!(rows[1].rel_err < 1e-3);
    }

    #[test]
    fn h3_off_identity_matches_volume() {
        let d = DilationStructure::from_ints(&[1, 1, 2]);
        let x = [0.3, -0.7, 0.45];
        let rows = ball_count_convergence(&h3_matrix(), &d, &x, 1.0, &[20.0, 80.0], 1 << 22).unwrap();
        assert!(rows[1].rel_err < 0.05, "{:?}", rows);
        assert!(rows[1].rel_err < rows[0].rel_err);
    }
}
