use crate::error::{Error, Result};
use crate::instance::{DirectedInstance, NodeInstance, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutKind {
    /// Members are arc indices.
    Edge,
    /// Members are node ids.
    Node,
}

/// How a cut was produced. Rounding records the threshold (and, for node
/// rounding, the skipped terminal index); seeded runs record the seed.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CutMeta {
    pub theta: Option<f64>,
    pub ell: Option<usize>,
    pub seed: Option<u64>,
}

/// A set of removed arcs or nodes together with its total weight.
///
/// Members are sorted and distinct, and never include an infinite-weight
/// member: the constructors reject those.
#[derive(Debug, Clone, PartialEq)]
pub struct CutSolution {
    pub kind: CutKind,
    pub members: Vec<usize>,
    pub cost: f64,
    pub meta: CutMeta,
}

fn sum_members(mut members: Vec<usize>, weight: impl Fn(usize) -> Option<Weight>) -> Result<(Vec<usize>, f64)> {
    members.sort_unstable();
    members.dedup();
    let mut cost = 0.0;
    for &e in &members {
        match weight(e) {
            None => return Err(Error::InvalidCut(format!("member {e} out of range"))),
            Some(Weight::Infinite) => {
                return Err(Error::InvalidCut(format!("member {e} has infinite weight")))
            }
            Some(Weight::Finite(w)) => cost += w,
        }
    }
    Ok((members, cost))
}

impl CutSolution {
    pub fn edges(inst: &DirectedInstance, members: Vec<usize>) -> Result<Self> {
        let (members, cost) = sum_members(members, |e| inst.arcs().get(e).map(|a| a.weight))?;
        Ok(CutSolution { kind: CutKind::Edge, members, cost, meta: CutMeta::default() })
    }

    /// Node cut. Terminals count as infinite-weight members and are rejected.
    pub fn nodes(inst: &NodeInstance, members: Vec<usize>) -> Result<Self> {
        let (members, cost) =
            sum_members(members, |v| (v < inst.n()).then(|| inst.effective_weight(v)))?;
        Ok(CutSolution { kind: CutKind::Node, members, cost, meta: CutMeta::default() })
    }

    pub fn with_meta(mut self, meta: CutMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Membership mask of length `size`.
    pub fn mask(&self, size: usize) -> Vec<bool> {
        let mut mask = vec![false; size];
        for &e in &self.members {
            mask[e] = true;
        }
        mask
    }
}
