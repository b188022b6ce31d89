#![allow(dead_code)]

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use resolvent_roots::algebra::{rat, Rational, UniPoly, XSPoly};
use resolvent_roots::series::check_squarefree;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational in [-1, 1] with denominator at most 8.
pub fn unit_rational(rng: &mut ChaCha8Rng) -> Rational {
    let den = rng.gen_range(1..=8i64);
    let num = rng.gen_range(-den..=den);
    rat(num, den)
}

fn nonzero_unit_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let r = unit_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

/// Random `a_n x^n + ... + a_1 x + s` with `a_1 != 0`, `a_n != 0` and
/// squarefree `p(x, 0)`. Returns the ascending `[a_1, ..., a_n]` and the polynomial.
pub fn random_instance(rng: &mut ChaCha8Rng, degree: usize) -> (Vec<Rational>, XSPoly) {
    loop {
        let mut coeffs: Vec<Rational> = (0..degree).map(|_| unit_rational(rng)).collect();
        coeffs[0] = nonzero_unit_rational(rng);
        coeffs[degree - 1] = nonzero_unit_rational(rng);
        let p = XSPoly::with_parameter(&coeffs);
        if check_squarefree(&p).is_ok() {
            return (coeffs, p);
        }
    }
}

/// Taylor coefficients of the branch through 0 by direct coefficient matching
/// of `sum a_j x(s)^j + s = 0`, independent of derivatives and recurrences.
pub fn reversion_oracle(x_coeffs: &[Rational], last: usize) -> Vec<Rational> {
    let a1 = &x_coeffs[0];
    let mut b = vec![Rational::zero(); last + 1];
    for k in 1..=last {
        let x = UniPoly::new(b[..k].to_vec());
        let mut sum = if k == 1 { rat(1, 1) } else { Rational::zero() };
        let mut power = x.clone();
        for a in &x_coeffs[1..] {
            power = &power * &x;
            sum += a * power.coeff(k);
        }
        b[k] = -sum / a1;
    }
    b
}
