use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::CMat;
use crate::{Error, Result, C64};

/// Constant matrices `c_j = cl(dx_j)` with `c_j c_k + c_k c_j = -2 δ_jk`.
///
/// `standard(1)` uses `c_1 = -i` and `standard(3)` uses `c_j = i σ_j`. With
/// these, `D = Σ c_j (∂_j + A_j)` has eigenvalues `2πk + θ` on `T^1` and the
/// spectral flow of a winding-`m` loop is `+m`.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordRep {
    gamma: Vec<CMat>,
}

impl CliffordRep {
    pub fn standard(n: usize) -> Result<Self> {
        let i = C64::new(0.0, 1.0);
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let gamma = match n {
            1 => vec![CMat::scalar(-i)],
            3 => {
                let s1 = CMat::from_rows(2, 2, vec![z, one, one, z]);
                let s2 = CMat::from_rows(2, 2, vec![z, -i, i, z]);
                let s3 = CMat::from_rows(2, 2, vec![one, z, z, -one]);
                vec![s1.scale(i), s2.scale(i), s3.scale(i)]
            }
            _ => return Err(Error::UnsupportedDimension(n)),
        };
        Ok(Self { gamma })
    }

    /// Builds a representation from explicit matrices after checking the
    /// Clifford relations and anti-hermiticity.
    pub fn from_matrices(gamma: Vec<CMat>) -> Result<Self> {
        let rep = Self { gamma };
        let defect = rep.relation_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidInput(alloc::format!(
                "matrices violate the Clifford relations (defect {defect:.3e})"
            )));
        }
        Ok(rep)
    }

    /// Same representation with `c_j` replaced by `-c_j`. Still a valid
    /// Clifford representation, but of the opposite orientation.
    pub fn with_flipped(&self, j: usize) -> Self {
        let mut gamma = self.gamma.clone();
        gamma[j] = gamma[j].scale_real(-1.0);
        Self { gamma }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Spinor dimension `2^{(n-1)/2}`.
    pub fn spin_dim(&self) -> usize {
        self.gamma[0].rows()
    }

    pub fn gamma(&self, j: usize) -> &CMat {
        &self.gamma[j]
    }

    pub fn gammas(&self) -> &[CMat] {
        &self.gamma
    }

    /// Largest entry of `c_j c_k + c_k c_j + 2δ_jk` and `c_j + c_j†` over all pairs.
    pub fn relation_defect(&self) -> f64 {
        let s = self.spin_dim();
        let mut worst: f64 = 0.0;
        for (j, cj) in self.gamma.iter().enumerate() {
            worst = worst.max(cj.add(&cj.adjoint()).max_abs());
            for (k, ck) in self.gamma.iter().enumerate() {
                let mut anti = cj.matmul(ck).add(&ck.matmul(cj));
                if j == k {
                    anti = anti.add(&CMat::identity(s).scale_real(2.0));
                }
                worst = worst.max(anti.max_abs());
            }
        }
        worst
    }
}
