use std::sync::Once;

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Col, Mat};

static SEQUENTIAL: Once = Once::new();

/// Dense LU with partial pivoting. Factorizations run single-threaded so
/// results do not depend on the machine's core count.
pub(crate) struct DenseLu(PartialPivLu<f64>);

impl DenseLu {
    pub(crate) fn new(m: &Mat<f64>) -> Self {
        SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
        DenseLu(m.partial_piv_lu())
    }

    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let b = Col::<f64>::from_fn(rhs.len(), |i| rhs[i]);
        let x = self.0.solve(&b);
        (0..rhs.len()).map(|i| x[i]).collect()
    }
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
