//! Decomposition certificates for groups of inertial automorphisms.

pub mod ki;
pub mod periodic;
pub mod pgroup;
pub mod qgroup;
pub mod split;
pub mod theorem_c;
pub mod witnesses;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::autos::{block, AutoExpr};
use crate::group::{Element, GroupDescriptor, Slot};

pub use ki::{ki_check, KiReport};
pub use periodic::periodic_decompose;
pub use pgroup::pgroup_decompose;
pub use qgroup::{gamma_p, q_generators, theorem_b_factor, Factorization};
pub use split::{split_bounded, split_bounded_within, CofiniteSubgroup, Split};
pub use theorem_c::{non_nilpotency_witness, theorem_c_split};
pub use witnesses::{counterexample_witness, counterexample_witness_with, fc_center_witness};

/// Copies per omega atom used for sampled checks.
pub const WINDOW: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremTag {
    PgroupNoncritical,
    PgroupCritical,
    TheoremA,
    TheoremB,
    TheoremCBoundedT,
    TheoremCFgQuotient,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub id: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub theorem: TheoremTag,
    pub factors: BTreeMap<String, Vec<AutoExpr>>,
    pub data: BTreeMap<String, Value>,
    pub checklist: Vec<CheckItem>,
}

impl Certificate {
    pub fn new(theorem: TheoremTag) -> Self {
        Certificate { theorem, factors: BTreeMap::new(), data: BTreeMap::new(), checklist: Vec::new() }
    }

    pub fn factor(&mut self, name: &str, gens: Vec<AutoExpr>) {
        self.factors.insert(name.to_string(), gens);
    }

    pub fn datum(&mut self, name: &str, v: impl Serialize) {
        self.data.insert(name.to_string(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn check(&mut self, id: &str, pass: bool, witness: Option<Value>) {
        self.checklist.push(CheckItem { id: id.to_string(), pass, witness });
    }

    pub fn all_pass(&self) -> bool {
        self.checklist.iter().all(|c| c.pass)
    }

    pub fn item(&self, id: &str) -> Option<&CheckItem> {
        self.checklist.iter().find(|c| c.id == id)
    }
}

/// γ on the listed atoms, the identity elsewhere.
pub fn embed(atoms: &[usize], e: AutoExpr) -> AutoExpr {
    if e == AutoExpr::Identity {
        return e;
    }
    AutoExpr::blocks(vec![block(atoms, e)])
}

/// Generators of every slot of the sampled window, with Prüfer atoms at depth `depth`.
pub fn window_elements(g: &GroupDescriptor, copies: usize, depth: u32) -> Vec<Element> {
    let mut out = Vec::new();
    for (i, a) in g.atoms.iter().enumerate() {
        let n = if a.is_omega() { copies } else { 1 };
        for c in 0..n {
            out.push(g.generator(Slot::new(i, c), depth));
        }
    }
    out
}

/// Pointwise agreement of two expressions on the sampled window.
pub fn agree_on_window(g: &GroupDescriptor, a: &AutoExpr, b: &AutoExpr, copies: usize) -> bool {
    [1, 3].iter().all(|&depth| {
        window_elements(g, copies, depth)
            .iter()
            .all(|x| matches!((a.apply(g, x), b.apply(g, x)), (Ok(u), Ok(v)) if u == v))
    })
}
