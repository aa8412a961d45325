use crate::error::{Error, Result};

/// Injective node correspondence from a source graph to a (possibly
/// larger) target graph. `assignment[i]` is the target node matched to
/// source node `i`; when both graphs have the same order the assignment
/// is a permutation. Stored as an index sequence, never as a 0/1 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    assignment: Vec<usize>,
    target_size: usize,
}

impl Matching {
    pub fn new(assignment: Vec<usize>, target_size: usize) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::Dimension("matching must have at least one source".into()));
        }
        if assignment.len() > target_size {
            return Err(Error::Dimension(format!(
                "matching has {} sources but only {} targets",
                assignment.len(),
                target_size
            )));
        }
        if !validate_matching(&assignment, target_size) {
            return Err(Error::Domain(
                "assignment is not an injective map into the target range".into(),
            ));
        }
        Ok(Matching {
            assignment,
            target_size,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Matching::new((0..n).collect(), n)
    }

    pub fn source_size(&self) -> usize {
        self.assignment.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    /// Target node matched to source node `i`.
    pub fn target_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assignment
    }

    pub fn is_permutation(&self) -> bool {
        self.assignment.len() == self.target_size
    }
}

/// True iff `assignment` is injective and every target index lies in
/// `[0, target_size)`. Pure predicate; `Matching::new` enforces it.
pub fn validate_matching(assignment: &[usize], target_size: usize) -> bool {
    let mut used = vec![false; target_size];
    for &t in assignment {
        if t >= target_size || used[t] {
            return false;
        }
        used[t] = true;
    }
    true
}
