//! Central-difference Wirtinger gradients.

use crate::error::{LabError, Result};
use crate::model::C64;

/// `∂h/∂z̄_k = ½(∂h/∂Re z_k + i ∂h/∂Im z_k)` for every coordinate, by
/// central differences of width `step`.
pub fn wirtinger_gradient<H>(h: H, z: &[C64], step: f64) -> Result<Vec<C64>>
where
    H: Fn(&[C64]) -> f64,
{
    if !(step.is_finite() && step > 0.0) {
        return Err(LabError::InvalidParameter(format!(
            "finite-difference step must be > 0, got {step}"
        )));
    }
    let mut probe = z.to_vec();
    let eval = |p: &[C64]| {
        let v = h(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LabError::HamiltonianOverflow)
        }
    };
    let mut grad = Vec::with_capacity(z.len());
    for k in 0..z.len() {
        let orig = probe[k];
        let mut partial = [0.0; 2];
        for (axis, dir) in [C64::new(step, 0.0), C64::new(0.0, step)]
            .into_iter()
            .enumerate()
        {
            probe[k] = orig + dir;
            let plus = eval(&probe)?;
            probe[k] = orig - dir;
            let minus = eval(&probe)?;
            partial[axis] = (plus - minus) / (2.0 * step);
        }
        probe[k] = orig;
        grad.push(C64::new(0.5 * partial[0], 0.5 * partial[1]));
    }
    Ok(grad)
}
