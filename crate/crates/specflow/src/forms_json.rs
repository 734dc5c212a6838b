//! JSON form of a [`TrigPolyForm`]:
//! `{ "n", "degree", "fiber", "terms": [ { "k", "I", "re", "im" } ] }`
//! with `I` 0-based and `re`/`im` the fiber matrix rows.

use serde::{Deserialize, Serialize};
use specflow_core::forms::{IndexSet, Momentum, TrigPolyForm};
use specflow_core::linalg::CMat;
use specflow_core::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormJson {
    pub n: usize,
    pub degree: usize,
    pub fiber: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub k: Vec<i32>,
    #[serde(rename = "I")]
    pub indices: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl FormJson {
    pub fn from_form(f: &TrigPolyForm) -> Self {
        let terms = f
            .terms()
            .map(|(k, idx, c)| {
                let rows = |part: fn(&C64) -> f64| -> Vec<Vec<f64>> {
                    (0..c.rows()).map(|i| (0..c.cols()).map(|j| part(&c[(i, j)])).collect()).collect()
                };
                TermJson { k: k.0.clone(), indices: idx.indices().collect(), re: rows(|z| z.re), im: rows(|z| z.im) }
            })
            .collect();
        Self { n: f.dim(), degree: f.degree(), fiber: f.fiber(), terms }
    }

    pub fn to_form(&self) -> Result<TrigPolyForm, String> {
        let mut f = TrigPolyForm::zero(self.n, self.degree, self.fiber);
        for (t, term) in self.terms.iter().enumerate() {
            let shape_ok = |m: &Vec<Vec<f64>>| m.len() == self.fiber && m.iter().all(|r| r.len() == self.fiber);
            if !shape_ok(&term.re) || !shape_ok(&term.im) {
                return Err(format!("term {t}: coefficient must be {0}x{0}", self.fiber));
            }
            let coeff = CMat::from_fn(self.fiber, self.fiber, |i, j| C64::new(term.re[i][j], term.im[i][j]));
            let idx = IndexSet::from_indices(&term.indices).map_err(|e| format!("term {t}: {e}"))?;
            f.insert(Momentum(term.k.clone()), idx, coeff).map_err(|e| format!("term {t}: {e}"))?;
        }
        Ok(f)
    }
}
