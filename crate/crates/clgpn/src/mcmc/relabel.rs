//! Posterior-mode extraction and label alignment.
//!
//! Mixture and hidden Markov posteriors are invariant under regime
//! relabeling, so raw draws can switch labels mid-chain. Alignment picks
//! the highest-posterior draw as the pivot and permutes every draw's
//! regimes to minimise the summed squared distance between its parameter
//! vectors and the pivot's, searching all `k!` permutations (`k ≤ 6`).
//! Ties keep the identity permutation, which makes the operation
//! idempotent.

use crate::error::{Error, Result};
use crate::mcmc::{ChainOutput, Draw};
use itertools::Itertools;

/// Index of the draw with the highest log posterior (earliest on ties);
/// `None` for an empty slice.
pub fn map_index(draws: &[Draw]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, d) in draws.iter().enumerate() {
        match best {
            Some((_, lp)) if d.log_post <= lp => {}
            _ => best = Some((i, d.log_post)),
        }
    }
    best.map(|(i, _)| i)
}

/// The highest-posterior draw of a finished chain.
pub fn map_estimate(output: &ChainOutput) -> Result<&Draw> {
    output
        .draws
        .get(output.map_index)
        .ok_or_else(|| Error::invalid("chain output contains no draws"))
}

/// Squared distance between a candidate regime assignment and the pivot:
/// `perm[j]` is the old index moved to new position `j`.
fn ssd(draw: &Draw, pivot: &[[f64; 8]], perm: &[usize]) -> f64 {
    let mut total = 0.0;
    for (j, &old) in perm.iter().enumerate() {
        let v = draw.params[old].as_vector();
        for (a, b) in v.iter().zip(&pivot[j]) {
            let d = a - b;
            total += d * d;
        }
    }
    total
}

fn apply_permutation(draw: &mut Draw, perm: &[usize]) {
    let k = perm.len();
    let mut inverse = vec![0usize; k];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
    }
    let old_params = draw.params.clone();
    for (new, &old) in perm.iter().enumerate() {
        draw.params[new] = old_params[old];
    }
    for l in draw.labels.iter_mut() {
        *l = inverse[*l];
    }
}

/// Align every draw's labels to the highest-posterior draw in place.
pub fn pivotal_reorder(output: &mut ChainOutput) -> Result<()> {
    let k = output.k;
    if k > 6 {
        return Err(Error::invalid(format!(
            "label alignment searches k! permutations and supports at most 6 regimes, got {k}"
        )));
    }
    if output.draws.is_empty() {
        return Err(Error::invalid("chain output contains no draws"));
    }
    if output.map_index >= output.draws.len() {
        return Err(Error::invalid("posterior-mode index out of range"));
    }
    if k < 2 {
        return Ok(());
    }
    let pivot: Vec<[f64; 8]> = output.draws[output.map_index]
        .params
        .iter()
        .map(|p| p.as_vector())
        .collect();
    let identity: Vec<usize> = (0..k).collect();
    for draw in &mut output.draws {
        let mut best_perm = identity.clone();
        let mut best = ssd(draw, &pivot, &identity);
        for perm in (0..k).permutations(k) {
            let s = ssd(draw, &pivot, &perm);
            if s < best {
                best = s;
                best_perm = perm;
            }
        }
        if best_perm != identity {
            apply_permutation(draw, &best_perm);
        }
    }
    Ok(())
}
