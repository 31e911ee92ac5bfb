/// Natural cubic spline through (x_i, y_i), x strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, String> {
        if x.len() != y.len() {
            return Err(format!("{} abscissae but {} values", x.len(), y.len()));
        }
        if x.len() < 2 {
            return Err("need at least two knots".into());
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err("knots must be strictly increasing".into());
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err("knots and values must be finite".into());
        }
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second-derivative system.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                let (h0, h1) = (x[i + 1] - x[i], x[i + 2] - x[i + 1]);
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
            }
            for i in 1..k {
                let lower = x[i + 1] - x[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, t: f64) -> usize {
        let last = self.x.len() - 2;
        match self.x.partition_point(|&k| k <= t) {
            0 => 0,
            p => (p - 1).min(last),
        }
    }

    /// Value; linear extrapolation outside the knot range is not offered, the
    /// end cubic is continued instead.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let (a, b) = ((self.x[i + 1] - t) / h, (t - self.x[i]) / h);
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let (a, b) = ((self.x[i + 1] - t) / h, (t - self.x[i]) / h);
        (self.y[i + 1] - self.y[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }

    /// Exact integral of the piecewise cubic over [lo, hi] (signed).
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return -self.integral(hi, lo);
        }
        let mut total = 0.0;
        let mut t = lo;
        while t < hi {
            let i = self.segment(t);
            let end = if i + 1 == self.x.len() - 1 {
                hi
            } else {
                self.x[i + 1].min(hi)
            };
            total += self.antiderivative_on(i, end) - self.antiderivative_on(i, t);
            t = end;
        }
        total
    }

    /// Antiderivative of segment i's cubic, anchored at x_i.
    fn antiderivative_on(&self, i: usize, t: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let (a, b) = ((self.x[i + 1] - t) / h, (t - self.x[i]) / h);
        let prim = |y0: f64, y1: f64, m0: f64, m1: f64| {
            -h * a * a / 2.0 * y0
                + h * b * b / 2.0 * y1
                + h * h * h / 6.0
                    * (-(a.powi(4) / 4.0 - a * a / 2.0) * m0 + (b.powi(4) / 4.0 - b * b / 2.0) * m1)
        };
        prim(self.y[i], self.y[i + 1], self.m[i], self.m[i + 1])
    }
}
