mod common;

use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;

use resolvent_roots::algebra::{
    int, parse_rational, poly_from_strings, poly_to_strings, rat, PolyMatrix, Rational, UniPoly, XSPoly,
};
use resolvent_roots::oracle::{aberth_roots, horner, match_roots, newton_polish, RootEstimate};
use resolvent_roots::resolvent::{implicit_derivatives, shift_homogenize, solve_resolvent};
use resolvent_roots::series::{
    branch_seeds, check_squarefree, evaluate_branch, expand_branch, extract_recurrence, normalize_coefficients,
    rescale,
};

use common::reversion_oracle;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-8i64..=8, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// `[a_1, ..., a_n]` with `a_1, a_n` nonzero.
fn x_coeffs(max_degree: usize) -> impl Strategy<Value = Vec<Rational>> {
    (2..=max_degree).prop_flat_map(|n| {
        (
            nonzero_rational(),
            prop::collection::vec(small_rational(), n - 2),
            nonzero_rational(),
        )
            .prop_map(|(a1, mid, an)| {
                let mut v = vec![a1];
                v.extend(mid);
                v.push(an);
                v
            })
    })
}

fn squarefree_instance(max_degree: usize) -> impl Strategy<Value = (Vec<Rational>, XSPoly)> {
    x_coeffs(max_degree)
        .prop_map(|c| {
            let p = XSPoly::with_parameter(&c);
            (c, p)
        })
        .prop_filter("squarefree at s = 0", |(_, p)| check_squarefree(p).is_ok())
}

fn s_poly() -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(-5i64..=5, 0..=3).prop_map(|c| UniPoly::from_ints(&c))
}

fn xs_poly(max_x: usize) -> impl Strategy<Value = XSPoly> {
    prop::collection::vec(s_poly(), 0..=max_x).prop_map(XSPoly::new)
}

fn complex_poly(max_degree: usize) -> impl Strategy<Value = Vec<Complex64>> {
    (1..=max_degree).prop_flat_map(|n| {
        (
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n),
            0.5f64..1.0,
        )
            .prop_map(|(low, lead)| {
                let mut c: Vec<Complex64> = low.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
                c.push(Complex64::new(lead, 0.0));
                c
            })
    })
}

fn factorial(k: usize) -> Rational {
    (1..=k as i64).fold(Rational::one(), |acc, j| acc * int(j))
}

fn zero_branch(p: &XSPoly, terms: usize) -> resolvent_roots::series::SeriesBranch {
    let ode = shift_homogenize(&solve_resolvent(p).unwrap(), p).unwrap();
    let rec = extract_recurrence(&ode).unwrap();
    let seeds = branch_seeds(p).unwrap();
    expand_branch(p, &rec, &ode.shift, 0, &seeds[0], terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduce_mod_leaves_a_multiple_of_p(q in xs_poly(7), c in x_coeffs(4)) {
        let p = XSPoly::with_parameter(&c);
        let n = p.degree_x().unwrap();
        let r = q.reduce_mod(&p).unwrap();
        prop_assert!(r.degree_x().map_or(true, |d| d < n));
        let (_, rem) = (&q - &r).div_rem(&p).unwrap();
        prop_assert!(rem.is_zero());
    }

    #[test]
    fn nullspace_vectors_are_annihilated_and_row_order_free(
        rows in (2usize..=3).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(s_poly(), n + 1), n)),
        rot in 0usize..3,
    ) {
        let m = PolyMatrix::new(rows.clone()).unwrap();
        if let Ok(v) = m.nullspace() {
            prop_assert!(m.mul_vec(&v).iter().all(UniPoly::is_zero));
            prop_assert!(!v.iter().all(UniPoly::is_zero));
            let mut permuted = rows;
            let k = rot % permuted.len();
            permuted.rotate_left(k);
            let w = PolyMatrix::new(permuted).unwrap().nullspace().unwrap();
            prop_assert_eq!(v, w);
        }
    }

    #[test]
    fn implicit_derivatives_match_local_reversion(c in x_coeffs(5), x0 in small_rational()) {
        let xpart = UniPoly::new(std::iter::once(Rational::zero()).chain(c.iter().cloned()).collect());
        let dp = xpart.derivative().eval(&x0);
        prop_assume!(!dp.is_zero());
        // Local coefficients of xpart(x0 + u) - xpart(x0) in u.
        let shifted: Vec<Rational> = (1..=c.len())
            .map(|k| {
                let mut d = xpart.clone();
                for _ in 0..k {
                    d = d.derivative();
                }
                d.eval(&x0) / factorial(k)
            })
            .collect();
        let order = 6;
        let local = reversion_oracle(&shifted, order);
        let p = XSPoly::with_parameter(&c);
        let derivs = implicit_derivatives(&p, order).unwrap();
        for d in &derivs {
            let value = d.numerator.eval(&x0) / dp.pow(d.denominator_exponent as i32);
            prop_assert_eq!(value, &local[d.order] * factorial(d.order), "order {}", d.order);
        }
    }

    #[test]
    fn exact_branch_satisfies_its_ode((_, p) in squarefree_instance(5)) {
        let ode = shift_homogenize(&solve_resolvent(&p).unwrap(), &p).unwrap();
        let branch = zero_branch(&p, 24);
        let exact = branch.exact_coefficients.unwrap();
        let applied = ode.apply_to_series(&exact);
        let valid = exact.len() - ode.order;
        for k in 0..valid {
            prop_assert!(applied.coeff(k).is_zero(), "s^{} coefficient {}", k, applied.coeff(k));
        }
    }

    #[test]
    fn aberth_roots_have_small_residuals(c in complex_poly(8)) {
        let roots = aberth_roots(&c, 1e-12).unwrap();
        prop_assert_eq!(roots.len(), c.len() - 1);
        let scale: f64 = c.iter().map(|z| z.norm()).sum();
        for r in &roots {
            let bound = 1e-10 * scale * r.value.norm().max(1.0).powi(c.len() as i32);
            prop_assert!(r.residual <= bound, "residual {} at {}", r.residual, r.value);
        }
    }

    #[test]
    fn newton_polish_never_worsens(c in complex_poly(6), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let x0 = Complex64::new(re, im);
        if let Ok(x) = newton_polish(&c, x0) {
            prop_assert!(horner(&c, x).norm() <= horner(&c, x0).norm());
        }
    }

    #[test]
    fn matching_is_symmetric(
        a in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6),
        b in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6),
    ) {
        let est = |v: &[(f64, f64)]| {
            v.iter()
                .map(|&(re, im)| RootEstimate::new(&[Complex64::one()], Complex64::new(re, im)))
                .collect::<Vec<_>>()
        };
        let (ea, eb) = (est(&a), est(&b));
        let ab = match_roots(&ea, &eb);
        let ba = match_roots(&eb, &ea);
        prop_assert_eq!(ab.max_distance, ba.max_distance);
        prop_assert_eq!(ab.pairs.len(), a.len().min(b.len()));
        prop_assert_eq!(ab.unreached.len(), ba.unmatched_estimates.len());
    }

    #[test]
    fn rescaling_does_not_change_values((_, p) in squarefree_instance(4), frac in 0.05f64..0.5, e_frac in 0.1f64..1.0) {
        let branch = zero_branch(&p, 48);
        let r = branch.radius_estimate.min(1e3);
        let s = Complex64::new(frac * r, 0.0);
        let base = evaluate_branch(&branch, s, &p).unwrap().estimate.value;
        let scaled = evaluate_branch(&rescale(&branch, e_frac * r), s, &p).unwrap().estimate.value;
        prop_assert!((base - scaled).norm() <= 1e-9 * base.norm().max(1e-12));
    }

    #[test]
    fn normalization_preserves_roots(c in x_coeffs(5), a0 in small_rational(), k in 0u32..6) {
        let blown: Vec<Rational> = c.iter().map(|x| x * int(1 << k)).collect();
        let a0 = a0 * int(1 << k);
        let p = XSPoly::with_parameter(&blown);
        let (q, a0_hat, m) = normalize_coefficients(&p, &a0).unwrap();
        prop_assert_eq!(&a0_hat * &m, a0.clone());
        let original = p.at_s(&a0);
        let normalized = q.at_s(&a0_hat);
        prop_assert_eq!(normalized.scale(&m), original);
    }

    #[test]
    fn seeds_follow_vieta((c, p) in squarefree_instance(6)) {
        let seeds = branch_seeds(&p).unwrap();
        let n = c.len();
        prop_assert_eq!(seeds.len(), n);
        prop_assert_eq!(seeds[0].exact.clone(), Some(Rational::zero()));
        let sum: Complex64 = seeds.iter().map(|s| s.value).sum();
        let expected = -resolvent_roots::algebra::to_f64(&(&c[n - 2] / &c[n - 1]));
        prop_assert!((sum - Complex64::new(expected, 0.0)).norm() <= 1e-9 * expected.abs().max(1.0));
    }

    #[test]
    fn shift_is_the_mean_root((c, p) in squarefree_instance(5)) {
        let ode = solve_resolvent(&p).unwrap();
        let n = c.len();
        prop_assert_eq!(ode.shift.clone(), &c[n - 2] / (&c[n - 1] * int(n as i64)));
        let y = shift_homogenize(&ode, &p).unwrap();
        prop_assert!(y.is_homogeneous());
        prop_assert_eq!(y.coeffs.len(), n);
    }

    #[test]
    fn rationals_round_trip_through_text(coeffs in prop::collection::vec(small_rational(), 0..6)) {
        let poly = UniPoly::new(coeffs);
        let text = poly_to_strings(&poly);
        prop_assert_eq!(poly_from_strings(&text), Some(poly.clone()));
        for c in poly.coeffs() {
            prop_assert_eq!(parse_rational(&c.to_string()), Some(c.clone()));
        }
    }
}
