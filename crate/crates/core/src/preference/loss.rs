use crate::error::{Error, Result};

/// Added under the square root so the distance is differentiable at 0.
pub const DISTANCE_EPS: f64 = 1e-12;

fn check_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() == y.len() {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "embedding lengths differ: {} vs {}",
            x.len(),
            y.len()
        )))
    }
}

/// `sqrt(Σ (x_i − y_i)² + DISTANCE_EPS)`.
pub fn euclidean_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sq + DISTANCE_EPS).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripletLoss {
    pub loss: f64,
    pub grad_anchor: Vec<f64>,
    pub grad_positive: Vec<f64>,
    pub grad_negative: Vec<f64>,
}

impl TripletLoss {
    pub fn is_active(&self) -> bool {
        self.loss > 0.0
    }
}

/// `max(d(a, p) − d(a, n) + margin, 0)` with gradients for all three embeddings.
pub fn triplet_loss(anchor: &[f64], positive: &[f64], negative: &[f64], margin: f64) -> Result<TripletLoss> {
    check_len(anchor, positive)?;
    check_len(anchor, negative)?;
    if margin.is_nan() || margin < 0.0 {
        return Err(Error::Input(format!("margin must be >= 0, got {margin}")));
    }
    let d_ap = euclidean_distance(anchor, positive)?;
    let d_an = euclidean_distance(anchor, negative)?;
    let value = d_ap - d_an + margin;
    let dim = anchor.len();
    if value <= 0.0 {
        return Ok(TripletLoss {
            loss: 0.0,
            grad_anchor: vec![0.0; dim],
            grad_positive: vec![0.0; dim],
            grad_negative: vec![0.0; dim],
        });
    }
    let mut grad_anchor = Vec::with_capacity(dim);
    let mut grad_positive = Vec::with_capacity(dim);
    let mut grad_negative = Vec::with_capacity(dim);
    for i in 0..dim {
        let up = (anchor[i] - positive[i]) / d_ap;
        let un = (anchor[i] - negative[i]) / d_an;
        grad_anchor.push(up - un);
        grad_positive.push(-up);
        grad_negative.push(un);
    }
    Ok(TripletLoss {
        loss: value,
        grad_anchor,
        grad_positive,
        grad_negative,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankNetLoss {
    pub loss: f64,
    pub grad_positive: f64,
    pub grad_negative: f64,
}

/// `−ln σ(u_p − u_n)`, evaluated as a stable softplus.
pub fn ranknet_loss(u_positive: f64, u_negative: f64) -> Result<RankNetLoss> {
    if !(u_positive.is_finite() && u_negative.is_finite()) {
        return Err(Error::Input("ranknet scores must be finite".into()));
    }
    let x = u_positive - u_negative;
    let loss = (-x).max(0.0) + (-x.abs()).exp().ln_1p();
    // 1 − σ(x) = σ(−x)
    let s = if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    };
    Ok(RankNetLoss {
        loss,
        grad_positive: -s,
        grad_negative: s,
    })
}
