//! Finite-difference checks of the model's parameter gradients.
//!
//! The training loss of one batch is differentiated by the tape and by
//! central differences over parameter coordinates, and the relative
//! errors are reduced per parameter group (the name prefix before the
//! first `.`).
//!
//! A coordinate whose step crosses a ReLU kink has no valid central
//! difference. Such a coordinate is recognised by one-sided differences
//! that disagree with each other while one of them matches the tape, and
//! is counted as a kink instead of an error.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sentifuse_tensor::gradcheck::{relative_error, FD_EPS, MAX_REL_ERR};
use sentifuse_tensor::{Binder, ParamGrads, Tape};

use crate::error::Result;
use crate::model::{Batch, Model};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub eps: f64,
    /// Coordinates drawn per parameter; `None` checks all of them.
    pub coords_per_param: Option<usize>,
    /// Seed of the coordinate draw.
    pub seed: u64,
    /// Groups to check; all when `None`.
    pub groups: Option<Vec<String>>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            eps: FD_EPS,
            coords_per_param: None,
            seed: 0,
            groups: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupCheck {
    pub group: String,
    pub coords: usize,
    /// Largest relative error over the non-kink coordinates.
    pub max_rel_err: f64,
    /// `name[index]` of the worst coordinate.
    pub worst: String,
    pub kinks: usize,
}

/// Sides whose slopes differ by more than this are not one smooth piece.
const KINK_SPLIT: f64 = 1e-2;
/// How closely one side must match the tape for a kink.
const KINK_MATCH: f64 = 1e-3;

/// Whether the central difference failed only because the function
/// bends inside `[x − eps, x + eps]`.
pub fn is_kink(analytic: f64, forward: f64, backward: f64) -> bool {
    relative_error(forward, backward) > KINK_SPLIT
        && relative_error(analytic, forward).min(relative_error(analytic, backward)) < KINK_MATCH
}

fn group_of(name: &str) -> &str {
    name.split('.').next().unwrap_or(name)
}

fn batch_loss(model: &Model, batch: &Batch) -> Result<f64> {
    let tape = Tape::new();
    let binder = Binder::frozen(&tape, &model.store);
    Ok(model.loss(&binder, batch)?.0.value().data()[0])
}

pub fn analytic_gradients(model: &Model, batch: &Batch) -> Result<ParamGrads> {
    let tape = Tape::new();
    let binder = Binder::new(&tape, &model.store);
    let (loss, _) = model.loss(&binder, batch)?;
    let mut grads = tape.backward(loss)?;
    Ok(binder.collect(&mut grads))
}

/// Compares `analytic` (aligned with the model's store, `None` meaning
/// zero) against central differences of the batch loss.
pub fn compare_gradients(
    model: &Model,
    batch: &Batch,
    analytic: &ParamGrads,
    opts: &CheckOptions,
) -> Result<Vec<GroupCheck>> {
    let mut probe = model.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut groups: Vec<GroupCheck> = Vec::new();
    let ids: Vec<_> = model.store.ids().collect();
    for id in ids {
        let name = model.store.name(id).to_string();
        if opts.groups.as_ref().is_some_and(|g| !g.iter().any(|g| g == group_of(&name))) {
            continue;
        }
        let numel = model.store.get(id).numel();
        let coords: Vec<usize> = match opts.coords_per_param {
            Some(k) if k < numel => sample(&mut rng, numel, k).into_vec(),
            _ => (0..numel).collect(),
        };
        let group = group_of(&name).to_string();
        let pos = match groups.iter().position(|g| g.group == group) {
            Some(p) => p,
            None => {
                groups.push(GroupCheck {
                    group,
                    coords: 0,
                    max_rel_err: 0.0,
                    worst: String::new(),
                    kinks: 0,
                });
                groups.len() - 1
            }
        };
        for k in coords {
            let orig = model.store.get(id).data()[k];
            let mut at = |x: f64| -> Result<f64> {
                probe.store.get_mut(id).data_mut()[k] = x;
                batch_loss(&probe, batch)
            };
            let (plus, minus) = (at(orig + opts.eps)?, at(orig - opts.eps)?);
            let numeric = (plus - minus) / (2.0 * opts.eps);
            let a = analytic[id.index()].as_ref().map_or(0.0, |g| g[k]);
            let err = relative_error(a, numeric);
            let kink = err >= MAX_REL_ERR && {
                let mid = at(orig)?;
                is_kink(a, (plus - mid) / opts.eps, (mid - minus) / opts.eps)
            };
            probe.store.get_mut(id).data_mut()[k] = orig;
            let g = &mut groups[pos];
            g.coords += 1;
            if kink {
                g.kinks += 1;
                continue;
            }
            if err > g.max_rel_err || g.worst.is_empty() {
                g.max_rel_err = g.max_rel_err.max(err);
                g.worst = format!("{name}[{k}]");
            }
        }
    }
    Ok(groups)
}

/// Tape gradients against finite differences for one batch.
pub fn check_model(model: &Model, batch: &Batch, opts: &CheckOptions) -> Result<Vec<GroupCheck>> {
    let analytic = analytic_gradients(model, batch)?;
    compare_gradients(model, batch, &analytic, opts)
}
