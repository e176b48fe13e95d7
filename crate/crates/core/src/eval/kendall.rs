use crate::error::{Error, Result};

/// Kendall's tau-b by enumerating all pairs.
///
/// `(C − D) / sqrt((C + D + Tx)(C + D + Ty))` where `Tx`/`Ty` count pairs tied
/// only in x / only in y. Returns 0 when either side is entirely tied.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("lengths differ: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Usage("kendall tau needs at least two observations".into()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Input("kendall tau input contains NaN".into()));
    }
    let (mut concordant, mut discordant, mut tie_x, mut tie_y) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = x[i].partial_cmp(&x[j]).expect("no NaN");
            let dy = y[i].partial_cmp(&y[j]).expect("no NaN");
            use std::cmp::Ordering::Equal;
            match (dx, dy) {
                (Equal, Equal) => {}
                (Equal, _) => tie_x += 1,
                (_, Equal) => tie_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n0 = (concordant + discordant) as f64;
    let denom = ((n0 + tie_x as f64) * (n0 + tie_y as f64)).sqrt();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((concordant as f64 - discordant as f64) / denom)
}
