//! Interpolation on uniform grids over `[0, 1]`.

/// Interpolation scheme for sampled profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Piecewise cubic Hermite with Fritsch–Carlson slopes; no new extrema.
    #[default]
    MonotoneCubic,
    Linear,
}

/// Precomputed interpolant of values sampled at `x_i = i / (len - 1)`.
#[derive(Debug, Clone)]
pub struct UniformInterpolant<'a> {
    values: &'a [f64],
    slopes: Option<Vec<f64>>,
    h: f64,
}

impl<'a> UniformInterpolant<'a> {
    pub fn new(values: &'a [f64], kind: Interpolation) -> Self {
        assert!(values.len() >= 2);
        let h = 1.0 / (values.len() - 1) as f64;
        let slopes = match kind {
            Interpolation::MonotoneCubic => Some(pchip_slopes(values, h)),
            Interpolation::Linear => None,
        };
        Self { values, slopes, h }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len() - 1;
        let s = (x / self.h).clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let t = s - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        match &self.slopes {
            None => y0 + t * (y1 - y0),
            Some(d) => {
                let t2 = t * t;
                let t3 = t2 * t;
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + t;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                h00 * y0 + h10 * self.h * d[i] + h01 * y1 + h11 * self.h * d[i + 1]
            }
        }
    }
}

fn pchip_slopes(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for i in 1..n - 1 {
        let (a, b) = (delta[i - 1], delta[i]);
        d[i] = if a * b <= 0.0 { 0.0 } else { 2.0 / (1.0 / a + 1.0 / b) };
    }
    d[0] = end_slope(delta[0], delta[1]);
    d[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
    d
}

fn end_slope(d0: f64, d1: f64) -> f64 {
    let s = 0.5 * (3.0 * d0 - d1);
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

/// Linear interpolation at `x` of samples on an increasing, possibly nonuniform grid.
pub fn linear_on_grid(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let j = xs.partition_point(|&v| v <= x).min(n - 1);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let t = (x - x0) / (x1 - x0);
    ys[j - 1] + t * (ys[j] - ys[j - 1])
}
