use std::fmt;

/// A binary feature selection `s ∈ {0,1}^p` with a cardinality budget.
///
/// Indices are zero-based, sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support {
    selected: Vec<usize>,
    budget: usize,
}

impl Support {
    /// Builds a support from arbitrary indices (sorted and deduplicated here).
    ///
    /// Panics if the resulting support is larger than `budget`; callers that
    /// handle untrusted input should use [`Support::try_new`].
    pub fn new(indices: impl IntoIterator<Item = usize>, budget: usize) -> Self {
        Self::try_new(indices, budget).expect("support exceeds its budget")
    }

    pub fn try_new(indices: impl IntoIterator<Item = usize>, budget: usize) -> Option<Self> {
        let mut selected: Vec<usize> = indices.into_iter().collect();
        selected.sort_unstable();
        selected.dedup();
        (selected.len() <= budget).then_some(Self { selected, budget })
    }

    /// Support with no budget constraint beyond its own size.
    pub fn unbudgeted(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(indices, usize::MAX);
        s.budget = s.selected.len();
        s
    }

    pub fn empty(budget: usize) -> Self {
        Self { selected: Vec::new(), budget }
    }

    pub fn full(p: usize) -> Self {
        Self { selected: (0..p).collect(), budget: p }
    }

    pub fn indices(&self) -> &[usize] {
        &self.selected
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.selected.binary_search(&j).is_ok()
    }

    /// Dense 0/1 indicator of length `p`.
    pub fn indicator(&self, p: usize) -> Vec<f64> {
        let mut s = vec![0.0; p];
        for &j in &self.selected {
            s[j] = 1.0;
        }
        s
    }

    /// Largest index plus one, or 0 when empty.
    pub fn span(&self) -> usize {
        self.selected.last().map_or(0, |j| j + 1)
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.selected.iter().map(|j| j.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_indices() {
        let s = Support::new([4, 1, 4, 2], 3);
        assert_eq!(s.indices(), &[1, 2, 4]);
        assert!(s.contains(2));
        assert!(!s.contains(3));
        assert_eq!(s.indicator(5), vec![0.0, 1.0, 1.0, 0.0, 1.0]);
        assert_eq!(s.to_string(), "{1,2,4}");
    }

    #[test]
    fn rejects_over_budget() {
        assert!(Support::try_new([0, 1, 2], 2).is_none());
    }
}
