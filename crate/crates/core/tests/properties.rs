use nilwalk::dilation::{limit_law, DilationStructure};
use nilwalk::group::{builtin, GroupLaw};
use proptest::prelude::*;

fn laws() -> Vec<GroupLaw> {
    ["abelian(2)", "h3_matrix", "h3_exp", "u4_matrix"].iter().map(|n| builtin(n).unwrap()).collect()
}

fn mul(law: &GroupLaw, x: &[i128], y: &[i128]) -> Vec<i128> {
    let mut out = vec![0; law.dim()];
    law.mul_i128(x, y, &mut out).unwrap();
    out
}

fn point(d: usize) -> impl Strategy<Value = Vec<i128>> {
    prop::collection::vec(-1000i128..1000, d)
}

proptest! {
    #[test]
    fn lattice_group_axioms(k in 0usize..4, seed in prop::collection::vec(-1000i128..1000, 18)) {
        let law = &laws()[k];
        let d = law.dim();
        // h3_exp is a lattice only on its even-product sublattice.
        let scale = if law.name == "h3_exp" { 2 } else { 1 };
        let pts: Vec<Vec<i128>> = seed.chunks(6).map(|c| c[..d].iter().map(|v| v * scale).collect()).collect();
        let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
        prop_assert_eq!(mul(law, &mul(law, x, y), z), mul(law, x, &mul(law, y, z)));
        let mut xi = vec![0; d];
        law.inv_i128(x, &mut xi).unwrap();
        prop_assert!(mul(law, x, &xi).iter().all(|v| *v == 0));
        prop_assert!(mul(law, &xi, x).iter().all(|v| *v == 0));
    }

    #[test]
    fn limit_dilations_are_homomorphisms(x in point(3), y in point(3), t in 0.1f64..10.0, b3 in 2i64..5) {
        let d = DilationStructure::from_ints(&[1, 1, b3]);
        let lim = limit_law(&builtin("h3_matrix").unwrap(), &d).unwrap().limit.unwrap();
        let f = d.factors(t);
        let s = |v: &[f64]| -> Vec<f64> { v.iter().zip(&f).map(|(a, c)| a * c).collect() };
        let (xf, yf): (Vec<f64>, Vec<f64>) = (x.iter().map(|v| *v as f64 / 100.0).collect(), y.iter().map(|v| *v as f64 / 100.0).collect());
        let mut lhs = vec![0.0; 3];
        lim.mul_f64(&s(&xf), &s(&yf), &mut lhs);
        let mut xy = vec![0.0; 3];
        lim.mul_f64(&xf, &yf, &mut xy);
        for (a, b) in lhs.iter().zip(s(&xy)) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }
}
