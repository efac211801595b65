//! Discrete CDF tables and their generalized inverses.
//!
//! Probability masses are evaluated in log space and summed directly from
//! zero, so the same table serves both the forward transform (noise to
//! count) and abduction (count to noise interval) with bitwise agreement.

/// `P(X <= k)` for `X ~ Binomial(trials, p)`, `k = 0..=trials`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialCdf {
    cdf: Vec<f64>,
}

impl BinomialCdf {
    pub fn new(trials: u32, p: f64) -> Self {
        let n = trials as usize;
        let mut cdf = vec![1.0; n + 1];
        if p <= 0.0 {
            return BinomialCdf { cdf };
        }
        if p >= 1.0 {
            cdf.iter_mut().take(n).for_each(|c| *c = 0.0);
            return BinomialCdf { cdf };
        }
        let ln_p = p.ln();
        let ln_q = (-p).ln_1p();
        let t = f64::from(trials);
        let mut ln_choose = 0.0;
        let mut acc = 0.0;
        for (k, slot) in cdf.iter_mut().enumerate().take(n) {
            let kf = k as f64;
            acc += (ln_choose + kf * ln_p + (t - kf) * ln_q).exp();
            *slot = acc.min(1.0);
            ln_choose += (t - kf).ln() - (kf + 1.0).ln();
        }
        // cdf[n] stays exactly 1
        BinomialCdf { cdf }
    }

    pub fn trials(&self) -> u32 {
        (self.cdf.len() - 1) as u32
    }

    /// `F(k)`, with `F(k) = 0` for `k < 0` and `1` above the support.
    pub fn cdf(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.cdf.get(k as usize).copied().unwrap_or(1.0)
        }
    }

    /// Smallest `k` with `F(k) >= u`.
    pub fn quantile(&self, u: f64) -> u32 {
        let k = self.cdf.partition_point(|&c| c < u);
        k.min(self.cdf.len() - 1) as u32
    }
}

/// `P(X <= k)` for `X ~ Poisson(mean)`, tabulated until the tail is below
/// double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonCdf {
    cdf: Vec<f64>,
}

impl PoissonCdf {
    pub fn new(mean: f64) -> Self {
        if mean <= 0.0 {
            return PoissonCdf { cdf: vec![1.0] };
        }
        let limit = (mean + 40.0 * mean.sqrt() + 50.0).ceil() as usize;
        let ln_mean = mean.ln();
        let mut ln_pmf = -mean;
        let mut acc = 0.0;
        let mut cdf = Vec::with_capacity(limit + 1);
        for k in 0..=limit {
            if k > 0 {
                ln_pmf += ln_mean - (k as f64).ln();
            }
            acc += ln_pmf.exp();
            cdf.push(acc.min(1.0));
            if acc >= 1.0 || (k as f64 > mean && ln_pmf < -745.0) {
                break;
            }
        }
        *cdf.last_mut().unwrap() = 1.0;
        PoissonCdf { cdf }
    }

    pub fn cdf(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.cdf.get(k as usize).copied().unwrap_or(1.0)
        }
    }

    pub fn quantile(&self, u: f64) -> u64 {
        let k = self.cdf.partition_point(|&c| c < u);
        k.min(self.cdf.len() - 1) as u64
    }
}
