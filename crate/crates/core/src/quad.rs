//! Small quadrature toolbox: adaptive Simpson for scalar integrands and the
//! 8-point Gauss-Legendre rule used by the dense resolvent discretization.

/// Nodes of the 8-point Gauss-Legendre rule on `[-1, 1]`, ascending.
pub const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

/// Weights matching [`GL8_NODES`]; they sum to 2.
pub const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
}

fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (left, lm, flm) = simpson_step(f, a, fa, m, fm);
    let (right, rm, frm) = simpson_step(f, m, fm, b, fb);
    let delta = left + right - whole;
    // Second disjunct: the correction has reached the double-precision noise
    // floor of the panel integral itself; further refinement only chases
    // roundoff (and an integrand with noisy low bits would otherwise force
    // the full 2^depth tree).
    if depth == 0
        || delta.abs() <= 15.0 * tol
        || delta.abs() <= 1e-14 * (left.abs() + right.abs())
    {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + adaptive_step(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol` (Richardson-corrected), with recursion capped at `max_depth`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson_step(&f, a, fa, b, fb);
    adaptive_step(&f, a, fa, b, fb, whole, m, fm, tol, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl8_weights_sum_to_two_and_integrate_polynomials_exactly() {
        assert_relative_eq!(GL8_WEIGHTS.iter().sum::<f64>(), 2.0, epsilon = 1e-15);
        // Exact for degree <= 15: check x^14 against 2/15.
        let quad: f64 = GL8_NODES
            .iter()
            .zip(GL8_WEIGHTS.iter())
            .map(|(&x, &w)| w * x.powi(14))
            .sum();
        assert_relative_eq!(quad, 2.0 / 15.0, max_relative = 1e-13);
        // Odd powers vanish by symmetry.
        let odd: f64 = GL8_NODES
            .iter()
            .zip(GL8_WEIGHTS.iter())
            .map(|(&x, &w)| w * x.powi(7))
            .sum();
        assert!(odd.abs() < 1e-16);
    }

    #[test]
    fn adaptive_simpson_known_integrals() {
        let one = adaptive_simpson(|x| x.exp(), 0.0, 1.0, 1e-12, 40);
        assert_relative_eq!(one, std::f64::consts::E - 1.0, max_relative = 1e-11);
        let osc = adaptive_simpson(|x| (10.0 * x).sin().abs(), 0.0, std::f64::consts::PI, 1e-10, 48);
        assert_relative_eq!(osc, 2.0, max_relative = 1e-8);
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-12, 40), 0.0);
    }
}
