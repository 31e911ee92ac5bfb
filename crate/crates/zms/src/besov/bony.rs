use crate::spectral::ScalarField;

use super::{BesovError, DyadicPartition};

/// ab = T_a b + T_b a + R(a, b), each piece with the dealiased product.
#[derive(Clone, Debug)]
pub struct BonyParts {
    /// Σ_j S_{j−1}a·Δ_j b with S_{j−1} = Σ_{j′ ≤ j−2} Δ_{j′}
    pub t_ab: ScalarField,
    pub t_ba: ScalarField,
    /// Σ_q Δ_q a·(Δ_{q−1} + Δ_q + Δ_{q+1}) b
    pub remainder: ScalarField,
}

impl BonyParts {
    pub fn sum(&self) -> ScalarField {
        self.t_ab.add(&self.t_ba).add(&self.remainder)
    }
}

pub fn bony_decompose(
    partition: &DyadicPartition,
    a: &ScalarField,
    b: &ScalarField,
) -> Result<BonyParts, BesovError> {
    if a.grid() != b.grid() {
        return Err(BesovError::GridMismatch);
    }
    let da = partition.blocks(a)?;
    let db = partition.blocks(b)?;
    let grid = a.grid();
    let count = da.len();

    let paraproduct = |low: &[ScalarField], high: &[ScalarField]| {
        let mut acc = vec![0.0; grid.len()];
        let mut s = vec![0.0; grid.len()];
        // Index k = j + 1; S_{j−1} collects blocks with index < k − 1.
        for k in 2..count {
            for (si, v) in s.iter_mut().zip(low[k - 2].values()) {
                *si += v;
            }
            for ((ai, si), h) in acc.iter_mut().zip(&s).zip(high[k].values()) {
                *ai += si * h;
            }
        }
        ScalarField::from_values(grid, acc)
            .expect("grid-sized buffer")
            .dealiased()
    };

    let mut rem = vec![0.0; grid.len()];
    for q in 0..count {
        let lo = q.saturating_sub(1);
        let hi = (q + 1).min(count - 1);
        for block in &db[lo..=hi] {
            for ((r, x), y) in rem.iter_mut().zip(da[q].values()).zip(block.values()) {
                *r += x * y;
            }
        }
    }

    Ok(BonyParts {
        t_ab: paraproduct(&da, &db),
        t_ba: paraproduct(&db, &da),
        remainder: ScalarField::from_values(grid, rem)
            .expect("grid-sized buffer")
            .dealiased(),
    })
}
