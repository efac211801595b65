#![allow(dead_code)]

use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn std_err(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0);
    (var / xs.len() as f64).sqrt()
}

/// Pearson goodness-of-fit p-value of integer samples against
/// Binomial(trials, p), adjacent bins pooled until each expects >= 5.
pub fn binomial_chi2_p(samples: &[u32], trials: u32, p: f64) -> f64 {
    let law = Binomial::new(p, u64::from(trials)).unwrap();
    let n = samples.len() as f64;
    let mut observed = vec![0.0; trials as usize + 1];
    for &s in samples {
        observed[s as usize] += 1.0;
    }
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for k in 0..=trials {
        o += observed[k as usize];
        e += n * law.pmf(u64::from(k));
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += o;
        last.1 += e;
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = (cells.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

/// Hand-evaluated root equilibrium: Binomial success probability.
pub fn root_theta(act: f64, input: f64, deact: f64) -> f64 {
    act * input / (act * input + deact)
}
