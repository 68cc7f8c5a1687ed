//! Dormand–Prince 5(4) for scalar ODEs, with Hairer's continuous extension
//! for dense output and a blow-up guard.

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

/// One accepted step `[t, t + h]` with its interpolation coefficients.
#[derive(Debug, Clone, Copy)]
struct Segment {
    t: f64,
    h: f64,
    cont: [f64; 5],
}

impl Segment {
    fn eval(&self, t: f64) -> f64 {
        let s = ((t - self.t) / self.h).clamp(0.0, 1.0);
        let s1 = 1.0 - s;
        let c = &self.cont;
        c[0] + s * (c[1] + s1 * (c[2] + s * (c[3] + s1 * c[4])))
    }
}

/// Dense solution on `[t0, t_end]`, or up to the blow-up time.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    t0: f64,
    y0: f64,
    segments: Vec<Segment>,
    t_end: f64,
    y_end: f64,
    blew_up_at: Option<f64>,
}

impl DenseSolution {
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn y_end(&self) -> f64 {
        self.y_end
    }

    pub fn blew_up_at(&self) -> Option<f64> {
        self.blew_up_at
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    /// Interpolated value, `None` outside the integrated range.
    pub fn eval(&self, t: f64) -> Option<f64> {
        if t < self.t0 || t > self.t_end {
            return None;
        }
        if t == self.t_end {
            return Some(self.y_end);
        }
        if self.segments.is_empty() {
            return Some(self.y0);
        }
        let k = self.segments.partition_point(|s| s.t <= t).saturating_sub(1);
        Some(self.segments[k].eval(t))
    }
}

/// Integrates `y' = f(y)` from `(t0, y0)` to `t_end`. Integration stops early
/// when `|y|` would exceed `bound` or the step size collapses, and the stop
/// time is reported as a blow-up.
pub fn integrate(f: impl Fn(f64) -> f64, t0: f64, y0: f64, t_end: f64, bound: f64, tol: Tolerances) -> DenseSolution {
    let mut sol = DenseSolution {
        t0,
        y0,
        segments: Vec::new(),
        t_end: t0,
        y_end: y0,
        blew_up_at: None,
    };
    if t_end <= t0 {
        return sol;
    }
    let (mut t, mut y) = (t0, y0);
    let mut k1 = f(y);
    if k1 == 0.0 {
        // Fixed point: the solution is constant.
        sol.t_end = t_end;
        return sol;
    }
    let scale0 = tol.atol + tol.rtol * y.abs();
    let mut h = (0.01 * scale0 / k1.abs()).max(1e-12 * (t_end - t0)).min(t_end - t0);
    let mut fac_old: f64 = 1e-4;
    let mut steps = 0;

    while t < t_end {
        if steps >= tol.max_steps || h < 1e-14 * t.abs().max(1.0) {
            sol.blew_up_at = Some(t);
            break;
        }
        steps += 1;
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = f(y + h * A21 * k1);
        let k3 = f(y + h * (A31 * k1 + A32 * k2));
        let k4 = f(y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = f(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let y_new = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
        let k7 = f(y_new);
        let err_raw = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let sc = tol.atol + tol.rtol * y.abs().max(y_new.abs());
        let err = (err_raw / sc).abs();

        if !err.is_finite() || !y_new.is_finite() {
            h *= 0.2;
            continue;
        }
        if err <= 1.0 {
            if y_new.abs() > bound {
                sol.blew_up_at = Some(t + h);
                break;
            }
            let ydiff = y_new - y;
            let bspl = h * k1 - ydiff;
            let cont = [
                y,
                ydiff,
                bspl,
                ydiff - h * k7 - bspl,
                h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7),
            ];
            sol.segments.push(Segment { t, h, cont });
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            sol.t_end = t;
            sol.y_end = y;
            // PI step control.
            let fac = (err.max(1e-10).powf(0.17) * fac_old.powf(-0.04) / 0.9).clamp(0.1, 5.0);
            fac_old = err.max(1e-4);
            h /= fac;
        } else {
            h /= (err.powf(0.2) / 0.9).min(10.0);
        }
    }
    sol
}

/// Classical RK4 with a fixed step; kept as a reference for tests.
pub fn rk4_fixed(f: impl Fn(f64) -> f64, y0: f64, t_end: f64, h: f64) -> f64 {
    let n = (t_end / h).round() as usize;
    let h = t_end / n as f64;
    let mut y = y0;
    for _ in 0..n {
        let k1 = f(y);
        let k2 = f(y + 0.5 * h * k1);
        let k3 = f(y + 0.5 * h * k2);
        let k4 = f(y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_and_dense_output() {
        let sol = integrate(|y| -2.0 * y, 0.0, 1.0, 3.0, 1e300, Tolerances::default());
        assert!(sol.blew_up_at().is_none());
        assert!((sol.y_end() - (-6.0f64).exp()).abs() < 1e-12);
        for t in [0.013, 0.5, 1.1, 2.99] {
            let v = sol.eval(t).unwrap();
            let exact = (-2.0 * t).exp();
            assert!((v - exact).abs() < 1e-9 * exact.max(1e-3), "t={t}: {v} vs {exact}");
        }
        assert!(sol.eval(3.5).is_none());
    }

    #[test]
    fn detects_finite_time_blow_up() {
        // y' = y², y(0) = 1 explodes at t = 1.
        let sol = integrate(|y| y * y, 0.0, 1.0, 2.0, 1e8, Tolerances::default());
        let tb = sol.blew_up_at().unwrap();
        assert!((tb - 1.0).abs() < 1e-6, "{tb}");
    }

    #[test]
    fn fixed_point_is_constant() {
        let sol = integrate(|y| y * (1.0 - y), 0.0, 1.0, 5.0, 1e8, Tolerances::default());
        assert_eq!(sol.eval(2.5), Some(1.0));
        assert_eq!(sol.y_end(), 1.0);
    }

    #[test]
    fn rk4_reference() {
        let y = rk4_fixed(|y| -y, 1.0, 1.0, 1e-3);
        assert!((y - (-1.0f64).exp()).abs() < 1e-13);
    }
}
