//! Worked examples: step measure, dilation and the closed-form vague limit.

use crate::dilation::{parse_rational, DilationStructure};
use crate::error::{Error, Result};
use crate::geometry::HomNorm;
use crate::group::{abelian, h3_matrix, GroupLaw};
use crate::limits::{LimitMeasure, LimitPart};
use crate::measures::{ComponentSpec, MeasureSpec, RadialNorm, StepMeasure};
use crate::quad::{integrate, integrate_to_inf};
use crate::special::cyclic_constant;
use num::{BigRational, One, ToPrimitive};

#[derive(Clone, Debug)]
pub struct WorkedExample {
    pub name: String,
    pub law: GroupLaw,
    pub measure: StepMeasure,
    pub dilation: DilationStructure,
    pub limit: LimitMeasure,
}

impl WorkedExample {
    pub fn norm(&self) -> HomNorm {
        HomNorm::from_dilation(&self.dilation)
    }
}

fn f(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}

fn check_alpha(a: &BigRational) -> Result<f64> {
    let x = f(a);
    if !(x > 0.0 && x < 2.0) {
        return Err(Error::InvalidMeasure(format!("alpha must lie in (0, 2), got {a}")));
    }
    Ok(x)
}

/// mu(k) = c_alpha (1+|k|)^{-1-alpha} on Z, delta_t x = t^{1/alpha} x.
pub fn z_cyclic(alpha: &BigRational) -> Result<WorkedExample> {
    let a = check_alpha(alpha)?;
    let law = abelian(1);
    let measure = StepMeasure::new(&law, &MeasureSpec::axis_cyclic(1, &[a]))?;
    let dilation = DilationStructure::new(vec![alpha.recip()])?;
    let limit = LimitMeasure::new(1, vec![LimitPart::AxisPower { axis: 0, kappa: cyclic_constant(a), alpha: a }])?;
    Ok(WorkedExample { name: format!("z-cyclic(alpha={alpha})"), law, measure, dilation, limit })
}

/// c (1+|x|+|y|)^{-alpha-2} on Z^2 with delta_t = (t^{1/alpha}, t^{1/beta}), beta < alpha.
pub fn z2_anisotropic(alpha: &BigRational, beta: &BigRational) -> Result<WorkedExample> {
    let a = check_alpha(alpha)?;
    if !(beta.to_f64().unwrap_or(0.0) > 0.0 && beta < alpha) {
        return Err(Error::InvalidDilation(format!("need 0 < beta < alpha, got beta = {beta}")));
    }
    let law = abelian(2);
    let spec = MeasureSpec {
        components: vec![ComponentSpec::SubgroupRadial { axes: vec![0, 1], alpha: a, norm: RadialNorm::L1, weight: 1.0 }],
    };
    let measure = StepMeasure::new(&law, &spec)?;
    let c = 1.0 / measure.components[0].z;
    let q = integrate(|u: f64| (1.0 + u.abs()).powf(-a - 2.0), -1.0, 1.0, 0.0, 1e-12, 200).value
        + 2.0 * integrate_to_inf(|u: f64| (1.0 + u).powf(-a - 2.0), 1.0, 0.0, 1e-12, 400).value;
    let dilation = DilationStructure::new(vec![alpha.recip(), beta.recip()])?;
    let limit = LimitMeasure::new(2, vec![LimitPart::AxisPower { axis: 0, kappa: c * q, alpha: a }])?;
    Ok(WorkedExample { name: format!("z2-anisotropic(alpha={alpha},beta={beta})"), law, measure, dilation, limit })
}

/// The gauge measure on H3 (matrix coordinates) under the four dilation regimes.
///
/// case 1: b = (1/a + 1/2, 1/a + 1/2, 2/a + 1), limit 0.
/// case 2: b = (1/a, 1/a, 2/a), limit c rho^{-a-4}.
/// case 3: b = (1/a, 1/a, 2/a + 1/2), limit on the (x1, x2) plane.
/// case 4: b = (1/a, 1/a + 1/2, 2/a + 3/4), limit on the x1 axis.
pub fn h3_gauge(alpha: &BigRational, case: u8) -> Result<WorkedExample> {
    let a = check_alpha(alpha)?;
    let law = h3_matrix();
    let measure = StepMeasure::new(&law, &MeasureSpec::woob34(a))?;
    let c = 1.0 / measure.components[0].z;
    let ia = alpha.recip();
    let half = BigRational::new(1.into(), 2.into());
    let b = match case {
        1 => vec![&ia + &half, &ia + &half, &ia + &ia + BigRational::one()],
        2 => vec![ia.clone(), ia.clone(), &ia + &ia],
        3 => vec![ia.clone(), ia.clone(), &ia + &ia + &half],
        4 => vec![ia.clone(), &ia + &half, &ia + &ia + &half + BigRational::new(1.into(), 4.into())],
        _ => return Err(Error::Unsupported(format!("the gauge example has cases 1..=4, got {case}"))),
    };
    let parts = match case {
        1 => vec![],
        2 => vec![LimitPart::Gauge { axes: vec![0, 1, 2], kappa: c, alpha: a, shear: 0.5 }],
        3 => {
            let s = integrate_to_inf(|s: f64| (1.0 + s).powf(-(2.0 + a / 2.0)), 0.0, 0.0, 1e-12, 400).value;
            vec![LimitPart::Radial { axes: vec![0, 1], kappa: 2.0 * c * s, alpha: a, norm: RadialNorm::Euclid }]
        }
        _ => {
            let e = -(a + 4.0) / 2.0;
            let inner = |u: f64| integrate_to_inf(|v: f64| (1.0 + u * u + v).powf(e), 0.0, 0.0, 1e-12, 400).value;
            let s = 2.0 * integrate_to_inf(inner, 0.0, 0.0, 1e-11, 400).value;
            vec![LimitPart::AxisPower { axis: 0, kappa: 2.0 * c * s, alpha: a }]
        }
    };
    let dilation = DilationStructure::new(b)?;
    let limit = LimitMeasure::new(3, parts)?;
    Ok(WorkedExample { name: format!("h3-gauge(alpha={alpha},case={case})"), law, measure, dilation, limit })
}

/// Axis-cyclic measure sum_i (1/3) c_{a_i} (1+|n|)^{-1-a_i} on e_i^n in H3, with
/// the straight dilation of the matching regime.
pub fn h3_axis(alphas: [&BigRational; 3]) -> Result<WorkedExample> {
    let af: Vec<f64> = alphas.iter().map(|a| check_alpha(a)).collect::<Result<_>>()?;
    let law = h3_matrix();
    let measure = StepMeasure::new(&law, &MeasureSpec::axis_cyclic(3, &af))?;
    let w: Vec<BigRational> = alphas.iter().map(|a| a.recip()).collect();
    let comm = &w[0] + &w[1];
    let (b3, regime) = if w[2] < comm {
        (comm, "i")
    } else if w[2] == comm {
        (comm, "ii")
    } else {
        (w[2].clone(), "iii")
    };
    let mut parts = Vec::new();
    for i in 0..3 {
        let bi = if i == 2 { &b3 } else { &w[i] };
        if *bi == w[i] {
            parts.push(LimitPart::AxisPower { axis: i, kappa: cyclic_constant(af[i]) / 3.0, alpha: af[i] });
        }
    }
    let dilation = DilationStructure::new(vec![w[0].clone(), w[1].clone(), b3])?;
    let limit = LimitMeasure::new(3, parts)?;
    let name = format!("h3-axis({regime};{},{},{})", alphas[0], alphas[1], alphas[2]);
    Ok(WorkedExample { name, law, measure, dilation, limit })
}

/// Examples used by the vague-convergence check, at alpha = 3/2 and beta = 1.
pub fn vague_suite() -> Result<Vec<WorkedExample>> {
    let a = parse_rational("3/2")?;
    let one = BigRational::one();
    Ok(vec![z_cyclic(&a)?, z2_anisotropic(&a, &one)?, h3_gauge(&a, 2)?, h3_gauge(&a, 3)?, h3_gauge(&a, 4)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_anisotropic_constant_closed_form() {
        let a = parse_rational("3/2").unwrap();
        let ex = z2_anisotropic(&a, &BigRational::one()).unwrap();
        let c = 1.0 / ex.measure.components[0].z;
        match &ex.limit.parts[0] {
            LimitPart::AxisPower { kappa, .. } => assert!((kappa - 2.0 * c / 2.5).abs() < 1e-10 * kappa),
            p => panic!("unexpected part {p:?}"),
        }
    }

    #[test]
    fn h3_gauge_case3_constant_closed_form() {
        let a = parse_rational("3/2").unwrap();
        let ex = h3_gauge(&a, 3).unwrap();
        let c = 1.0 / ex.measure.components[0].z;
        match &ex.limit.parts[0] {
            // 2c int_0^inf (1+s)^{-(2+a/2)} ds = 2c / (1 + a/2).
            LimitPart::Radial { kappa, .. } => assert!((kappa - 2.0 * c / 1.75).abs() < 1e-9 * kappa),
            p => panic!("unexpected part {p:?}"),
        }
    }

    #[test]
    fn h3_axis_regimes() {
        let one = BigRational::one();
        let ex = h3_axis([&one, &one, &one]).unwrap();
        assert_eq!(ex.dilation.b_f64(), vec![1.0, 1.0, 2.0]);
        assert_eq!(ex.limit.parts.len(), 2);
        let half = parse_rational("1/2").unwrap();
        let ex = h3_axis([&one, &one, &half]).unwrap();
        assert_eq!(ex.limit.parts.len(), 3);
        assert!(ex.name.contains("ii"));
    }
}
