//! Gauss–Legendre rules with interval bisection.

use std::sync::OnceLock;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b f`, propagating the first error from `f`.
    pub fn integrate<E>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> Result<f64, E>) -> Result<f64, E> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x)?;
        }
        Ok(sum * half)
    }

    /// Recursive bisection until the two-half estimate matches the whole one
    /// to `rel_tol`, or `max_depth` is reached.
    pub fn integrate_adaptive<E>(
        &self,
        a: f64,
        b: f64,
        rel_tol: f64,
        max_depth: u32,
        f: &mut impl FnMut(f64) -> Result<f64, E>,
    ) -> Result<f64, E> {
        let whole = self.integrate(a, b, &mut *f)?;
        self.refine(a, b, whole, rel_tol, max_depth, f)
    }

    fn refine<E>(
        &self,
        a: f64,
        b: f64,
        whole: f64,
        rel_tol: f64,
        depth: u32,
        f: &mut impl FnMut(f64) -> Result<f64, E>,
    ) -> Result<f64, E> {
        let mid = 0.5 * (a + b);
        let left = self.integrate(a, mid, &mut *f)?;
        let right = self.integrate(mid, b, &mut *f)?;
        let halves = left + right;
        if depth == 0 || (halves - whole).abs() <= rel_tol * halves.abs() + f64::MIN_POSITIVE {
            return Ok(halves);
        }
        Ok(self.refine(a, mid, left, rel_tol, depth - 1, f)? + self.refine(mid, b, right, rel_tol, depth - 1, f)?)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The shared 8-point rule.
pub fn gauss_legendre_8() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn ok(v: f64) -> Result<f64, Infallible> {
        Ok(v)
    }

    #[test]
    fn eight_point_rule_matches_tabulated_values() {
        let rule = gauss_legendre_8();
        // Abramowitz & Stegun, table 25.4.
        let expected = [
            (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
            (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
            (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
            (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
        ];
        for (k, (x, w)) in expected.iter().enumerate() {
            assert!((rule.nodes()[4 + k] - x).abs() < 1e-15);
            assert!((rule.weights()[4 + k] - w).abs() < 1e-15);
            assert!((rule.nodes()[3 - k] + x).abs() < 1e-15);
        }
        assert!((rule.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_fifteen() {
        let rule = gauss_legendre_8();
        for degree in 0..=15 {
            let got = rule.integrate(0.0, 2.0, |x| ok(x.powi(degree))).unwrap();
            let exact = 2f64.powi(degree + 1) / (degree + 1) as f64;
            assert!((got - exact).abs() < 1e-12 * exact, "degree {degree}");
        }
        let got = rule.integrate(0.0, 2.0, |x| ok(x.powi(16))).unwrap();
        assert!((got - 2f64.powi(17) / 17.0).abs() > 1e-10);
    }

    #[test]
    fn adaptive_handles_a_near_singularity() {
        let rule = gauss_legendre_8();
        // ∫_0^1 dt / (1.0001 − t) = ln(1.0001 / 0.0001)
        let exact = (1.0001f64 / 0.0001).ln();
        let got = rule.integrate_adaptive(0.0, 1.0, 1e-14, 40, &mut |t| ok(1.0 / (1.0001 - t))).unwrap();
        assert!((got - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn errors_propagate() {
        let rule = gauss_legendre_8();
        let r: Result<f64, &str> = rule.integrate(0.0, 1.0, |x| if x > 0.5 { Err("stop") } else { Ok(x) });
        assert_eq!(r, Err("stop"));
    }
}
