//! Functions `G -> G` as lookup tables.

use std::sync::Arc;

use crate::algebra::{AlgebraError, GroupTable, Result};

/// A total function on a group, stored as the sequence of its values on `0..q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncTable {
    group: Arc<GroupTable>,
    values: Vec<usize>,
}

impl FuncTable {
    pub fn new(group: Arc<GroupTable>, values: Vec<usize>) -> Result<Self> {
        let q = group.order();
        if values.len() != q {
            return Err(AlgebraError::InvalidTable(format!(
                "table has {} entries, group order is {q}",
                values.len()
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= q) {
            return Err(AlgebraError::ElementOutOfRange { code: v, order: q });
        }
        Ok(FuncTable { group, values })
    }

    pub fn from_fn(group: Arc<GroupTable>, f: impl Fn(usize) -> usize) -> Result<Self> {
        let values = group.elements().map(f).collect();
        Self::new(group, values)
    }

    pub fn identity(group: Arc<GroupTable>) -> Self {
        let values = group.elements().collect();
        FuncTable { group, values }
    }

    pub fn constant(group: Arc<GroupTable>, c: usize) -> Result<Self> {
        group.check_element(c)?;
        let values = vec![c; group.order()];
        Ok(FuncTable { group, values })
    }

    #[inline]
    pub fn get(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn into_values(self) -> Vec<usize> {
        self.values
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `#f^{-1}(b)` for every `b`.
    pub fn preimage_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.order()];
        for &v in &self.values {
            counts[v] += 1;
        }
        counts
    }

    /// The sorted image set.
    pub fn image(&self) -> Vec<usize> {
        self.preimage_counts()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(b, _)| b)
            .collect()
    }

    /// `V(f)`, the number of distinct values.
    pub fn image_size(&self) -> usize {
        self.preimage_counts().iter().filter(|&&c| c > 0).count()
    }

    /// `u(f)`, the largest preimage size.
    pub fn uniformity(&self) -> usize {
        self.preimage_counts().into_iter().max().unwrap_or(0)
    }

    pub fn is_permutation(&self) -> bool {
        self.preimage_counts().iter().all(|&c| c == 1)
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    fn same_group(&self, other: &FuncTable) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) || *self.group == *other.group {
            Ok(())
        } else {
            Err(AlgebraError::InvalidTable(format!(
                "functions live on different groups ({} vs {})",
                self.group.describe(),
                other.group.describe()
            )))
        }
    }

    /// Pointwise `x -> self(x) + other(x)`.
    pub fn add(&self, other: &FuncTable) -> Result<FuncTable> {
        self.same_group(other)?;
        let g = &self.group;
        let values = (0..self.order())
            .map(|x| g.add(self.values[x], other.values[x]))
            .collect();
        Ok(FuncTable {
            group: g.clone(),
            values,
        })
    }

    /// Pointwise `x -> self(x) + (-other(x))`.
    pub fn sub(&self, other: &FuncTable) -> Result<FuncTable> {
        self.same_group(other)?;
        let g = &self.group;
        let values = (0..self.order())
            .map(|x| g.sub(self.values[x], other.values[x]))
            .collect();
        Ok(FuncTable {
            group: g.clone(),
            values,
        })
    }

    /// `self ∘ inner`, i.e. `x -> self(inner(x))`.
    pub fn compose(&self, inner: &FuncTable) -> Result<FuncTable> {
        self.same_group(inner)?;
        let values = inner.values.iter().map(|&y| self.values[y]).collect();
        Ok(FuncTable {
            group: self.group.clone(),
            values,
        })
    }

    /// Inverse table of a permutation.
    pub fn inverse(&self) -> Option<FuncTable> {
        if !self.is_permutation() {
            return None;
        }
        let mut inv = vec![0; self.order()];
        for (x, &y) in self.values.iter().enumerate() {
            inv[y] = x;
        }
        Some(FuncTable {
            group: self.group.clone(),
            values: inv,
        })
    }
}
