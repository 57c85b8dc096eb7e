//! Adaptive 8-point Gauss–Legendre quadrature.

const NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Hard cap on bisection depth per interval.
pub const MAX_DEPTH: u32 = 40;

/// Fixed 8-point rule on `[a, b]`.
pub fn gauss_legendre8(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for k in 0..4 {
        let dx = h * NODES[k];
        acc += WEIGHTS[k] * (f(c - dx) + f(c + dx));
    }
    acc * h
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

/// Integrates `f` over `[a, b]`, bisecting until the difference between the
/// one-panel and two-panel rules on an interval is below `tol` scaled by the
/// interval's share of `[a, b]`.
pub fn adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Quad {
    if !(b > a) {
        return Quad::default();
    }
    let whole = gauss_legendre8(&mut f, a, b);
    let mut out = Quad::default();
    recurse(&mut f, a, b, whole, tol.max(f64::MIN_POSITIVE), b - a, 0, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn recurse(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, span: f64, depth: u32, out: &mut Quad) {
    let m = 0.5 * (a + b);
    let left = gauss_legendre8(f, a, m);
    let right = gauss_legendre8(f, m, b);
    let err = (left + right - whole).abs();
    let budget = tol * (b - a) / span;
    if err <= budget || depth >= MAX_DEPTH || m <= a || m >= b {
        out.value += left + right;
        out.error += err;
        return;
    }
    recurse(f, a, m, left, tol, span, depth + 1, out);
    recurse(f, m, b, right, tol, span, depth + 1, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_for_degree_15() {
        let mut f = |x: f64| x.powi(15) + 3.0 * x.powi(4);
        let v = gauss_legendre8(&mut f, 0.0, 2.0);
        assert_relative_eq!(v, 2f64.powi(16) / 16.0 + 3.0 * 32.0 / 5.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let q = adaptive(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12);
        assert_relative_eq!(q.value, 0.5 * (0.09 + 0.49), epsilon = 1e-12);
        let q = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, 1e-10);
        assert_relative_eq!(q.value, 2.0 / 3.0, epsilon = 1e-9);
    }
}
