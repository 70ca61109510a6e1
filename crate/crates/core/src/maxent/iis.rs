//! Improved Iterative Scaling for the conditional model.

use super::{empirical_expectations, log_normalize, normalize, EventSpace, MaxentModel, TrainingMeta};
use crate::features::FeatureSet;

/// Largest allowed single-iteration weight change.
pub const MAX_STEP: f64 = 20.0;

#[derive(Clone, Debug, PartialEq)]
pub struct IisConfig {
    pub max_iterations: usize,
    /// Stop once every update is smaller than this.
    pub tolerance: f64,
    /// Variance of an optional zero-mean Gaussian prior on the weights.
    pub prior_variance: Option<f64>,
}

impl Default for IisConfig {
    fn default() -> Self {
        IisConfig {
            max_iterations: 3,
            tolerance: 1e-4,
            prior_variance: None,
        }
    }
}

/// Active features of every (history, future) pair, row-major by history.
struct ActiveTable {
    offsets: Vec<usize>,
    features: Vec<u32>,
    futures: usize,
}

impl ActiveTable {
    fn build(model: &MaxentModel, events: &EventSpace) -> Self {
        let sym = model.features().symbols();
        let futures = model.future_codes().len();
        let mut offsets = Vec::with_capacity(events.histories.len() * futures + 1);
        let mut features = Vec::new();
        offsets.push(0);
        for h in 0..events.histories.len() {
            let [h2, h1] = events.history_tags(h);
            let (c2, c1) = (sym.code(h2), sym.code(h1));
            for &y in model.future_codes() {
                model.features().active_codes(&[c2, c1, y], &mut features);
                offsets.push(features.len());
            }
        }
        ActiveTable {
            offsets,
            features,
            futures,
        }
    }

    fn get(&self, h: usize, y: usize) -> &[u32] {
        let k = h * self.futures + y;
        &self.features[self.offsets[k]..self.offsets[k + 1]]
    }

    fn scores(&self, h: usize, weights: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.futures).map(|y| self.get(h, y).iter().map(|&f| weights[f as usize]).sum::<f64>()));
    }
}

/// Solves Σ_m a[m]·e^{δm} + (λ+δ)/σ² = target for δ by Newton's method,
/// falling back to bisection, within ±[`MAX_STEP`]. Returns the update and
/// whether it was clamped.
pub fn solve_update(a: &[f64], target: f64, lambda: f64, prior_variance: Option<f64>) -> (f64, bool) {
    let inv_var = prior_variance.map_or(0.0, |v| 1.0 / v);
    let g = |d: f64| {
        let mut v = (lambda + d) * inv_var - target;
        let mut dv = inv_var;
        for (m, &am) in a.iter().enumerate() {
            if am != 0.0 {
                let e = am * (d * m as f64).exp();
                v += e;
                dv += e * m as f64;
            }
        }
        (v, dv)
    };
    let (mut lo, mut hi) = (-MAX_STEP, MAX_STEP);
    if g(lo).0 >= 0.0 {
        return (lo, true);
    }
    if g(hi).0 <= 0.0 {
        return (hi, true);
    }
    let mut d = 0.0;
    for _ in 0..200 {
        let (v, dv) = g(d);
        if v == 0.0 {
            break;
        }
        if v > 0.0 {
            hi = d;
        } else {
            lo = d;
        }
        let mut next = if dv > 0.0 { d - v / dv } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - d).abs() <= 1e-14 * (1.0 + d.abs()) {
            d = next;
            break;
        }
        d = next;
    }
    (d, false)
}

/// Trains the weights of `features` on `events`, starting from the weights
/// they carry.
pub fn train_iis(events: &EventSpace, features: FeatureSet, cutoff: usize, config: &IisConfig) -> MaxentModel {
    let mut meta = TrainingMeta {
        cutoff,
        prior_variance: config.prior_variance,
        ..TrainingMeta::default()
    };
    let mut model = MaxentModel::new(features, events.futures.clone(), TrainingMeta::default());
    let table = ActiveTable::build(&model, events);
    let n = events.total() as f64;
    let target: Vec<f64> = empirical_expectations(model.features(), events).iter().map(|e| e * n).collect();
    let mut weights = model.features().weights();
    let width = model.features().patterns().len() + 1;

    let mut by_history: Vec<Vec<(usize, f64)>> = vec![Vec::new(); events.histories.len()];
    for e in &events.events {
        by_history[e.history as usize].push((e.future as usize, e.count as f64));
    }

    let mut scores = Vec::new();
    let mut a = vec![0.0; weights.len() * width];
    for _ in 0..config.max_iterations {
        a.iter_mut().for_each(|x| *x = 0.0);
        let mut ll = 0.0;
        for (h, &count) in events.history_counts.iter().enumerate() {
            table.scores(h, &weights, &mut scores);
            let lp = log_normalize(&scores);
            for &(y, c) in &by_history[h] {
                ll += c * lp[y];
            }
            let p = normalize(&scores);
            for (y, &py) in p.iter().enumerate() {
                let active = table.get(h, y);
                let m = active.len();
                let mass = count as f64 * py;
                for &f in active {
                    a[f as usize * width + m] += mass;
                }
            }
        }
        meta.log_likelihood.push(ll);
        let mut largest: f64 = 0.0;
        for (f, w) in weights.iter_mut().enumerate() {
            let (d, clamped) = solve_update(&a[f * width..(f + 1) * width], target[f], *w, config.prior_variance);
            meta.clamped_updates += usize::from(clamped);
            *w += d;
            largest = largest.max(d.abs());
        }
        meta.iterations += 1;
        if largest < config.tolerance {
            meta.converged = true;
            break;
        }
    }
    meta.log_likelihood
        .push(current_ll(&table, &by_history, &weights, &mut scores));
    let mut fs = model.features().clone();
    fs.set_weights(&weights);
    model = MaxentModel::new(fs, model.futures().clone(), meta);
    model
}

fn current_ll(
    table: &ActiveTable,
    by_history: &[Vec<(usize, f64)>],
    weights: &[f64],
    scores: &mut Vec<f64>,
) -> f64 {
    let mut ll = 0.0;
    for (h, seen) in by_history.iter().enumerate() {
        table.scores(h, weights, scores);
        let lp = log_normalize(scores);
        for &(y, c) in seen {
            ll += c * lp[y];
        }
    }
    ll
}
