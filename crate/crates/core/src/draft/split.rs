use rand::seq::SliceRandom;

use super::log::Draft;
use crate::error::{Error, Result};
use crate::rng;

/// Partition drafts into `(train, test)` at draft granularity.
///
/// The test side receives `round(n · test_fraction)` drafts chosen by a seeded
/// shuffle; both sides keep the input order.
pub fn split_drafts(drafts: Vec<Draft>, test_fraction: f64, seed: u64) -> Result<(Vec<Draft>, Vec<Draft>)> {
    if drafts.is_empty() {
        return Err(Error::Usage("cannot split an empty draft list".into()));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Usage(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n = drafts.len();
    let n_test = (n as f64 * test_fraction).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed, &[rng::SPLIT]));
    let mut is_test = vec![false; n];
    for &i in &order[..n_test] {
        is_test[i] = true;
    }
    let (test, train): (Vec<_>, Vec<_>) = drafts
        .into_iter()
        .zip(is_test)
        .partition(|(_, t)| *t);
    Ok((
        train.into_iter().map(|(d, _)| d).collect(),
        test.into_iter().map(|(d, _)| d).collect(),
    ))
}
