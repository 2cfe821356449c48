//! Interpretations, model sets and role projections.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{GroundAtom, PeerId, PredKey, PredRole, Roles};

/// A set of ground atoms kept in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interpretation(BTreeSet<GroundAtom>);

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn contains(&self, a: &GroundAtom) -> bool {
        self.0.contains(a)
    }
    pub fn insert(&mut self, a: GroundAtom) -> bool {
        self.0.insert(a)
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = &GroundAtom> {
        self.0.iter()
    }
    pub fn atoms(&self) -> &BTreeSet<GroundAtom> {
        &self.0
    }
    pub fn is_subset(&self, other: &Interpretation) -> bool {
        self.0.is_subset(&other.0)
    }
    pub fn filter(&self, mut keep: impl FnMut(&GroundAtom) -> bool) -> Interpretation {
        Interpretation(self.0.iter().filter(|a| keep(a)).cloned().collect())
    }
    pub fn union(&self, other: &Interpretation) -> Interpretation {
        Interpretation(self.0.union(&other.0).cloned().collect())
    }
    pub fn intersection(&self, other: &Interpretation) -> Interpretation {
        Interpretation(self.0.intersection(&other.0).cloned().collect())
    }
    pub fn difference(&self, other: &Interpretation) -> Interpretation {
        Interpretation(self.0.difference(&other.0).cloned().collect())
    }
    /// Drops atoms of peers with id greater than `n`.
    pub fn restrict_peers(&self, n: u32) -> Interpretation {
        self.filter(|a| a.peer.0 <= n)
    }
    pub fn restrict_to_peer(&self, p: PeerId) -> Interpretation {
        self.filter(|a| a.peer == p)
    }
}

impl FromIterator<GroundAtom> for Interpretation {
    fn from_iter<I: IntoIterator<Item = GroundAtom>>(iter: I) -> Self {
        Interpretation(iter.into_iter().collect())
    }
}

impl IntoIterator for Interpretation {
    type Item = GroundAtom;
    type IntoIter = std::collections::btree_set::IntoIter<GroundAtom>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a Interpretation {
    type Item = &'a GroundAtom;
    type IntoIter = std::collections::btree_set::Iter<'a, GroundAtom>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Extend<GroundAtom> for Interpretation {
    fn extend<I: IntoIterator<Item = GroundAtom>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            a.fmt(f)?;
        }
        f.write_str("}")
    }
}

/// A duplicate-free, canonically sorted set of interpretations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModelSet(BTreeSet<Interpretation>);

impl ModelSet {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = &Interpretation> {
        self.0.iter()
    }
    pub fn contains(&self, m: &Interpretation) -> bool {
        self.0.contains(m)
    }
    pub fn insert(&mut self, m: Interpretation) -> bool {
        self.0.insert(m)
    }
    pub fn map(&self, f: impl FnMut(&Interpretation) -> Interpretation) -> ModelSet {
        ModelSet(self.0.iter().map(f).collect())
    }
    pub fn filter(&self, mut f: impl FnMut(&Interpretation) -> bool) -> ModelSet {
        ModelSet(self.0.iter().filter(|m| f(m)).cloned().collect())
    }
    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.0.is_subset(&other.0)
    }
    /// Union of all models (brave reading).
    pub fn union_all(&self) -> Interpretation {
        self.0.iter().flat_map(|m| m.iter().cloned()).collect()
    }
    /// Intersection of all models (cautious reading); empty for an empty set.
    pub fn intersection_all(&self) -> Interpretation {
        let mut it = self.0.iter();
        let Some(first) = it.next() else { return Interpretation::new() };
        it.fold(first.clone(), |acc, m| acc.intersection(m))
    }
}

impl FromIterator<Interpretation> for ModelSet {
    fn from_iter<I: IntoIterator<Item = Interpretation>>(iter: I) -> Self {
        ModelSet(iter.into_iter().collect())
    }
}

impl IntoIterator for ModelSet {
    type Item = Interpretation;
    type IntoIter = std::collections::btree_set::IntoIter<Interpretation>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a ModelSet {
    type Item = &'a Interpretation;
    type IntoIter = std::collections::btree_set::Iter<'a, Interpretation>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.0 {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Selector for [`project`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoleFilter {
    D,
    LP,
    MP,
    MPmax,
    MPmin,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("predicate {0} is not declared in the system")]
pub struct RoleResolutionError(pub PredKey);

fn role_matches(role: PredRole, filter: RoleFilter) -> bool {
    match (filter, role) {
        (RoleFilter::D, PredRole::Base) => true,
        (RoleFilter::LP, PredRole::Derived) => true,
        (RoleFilter::MP, PredRole::Mapping { .. }) => true,
        (RoleFilter::MPmax, PredRole::Mapping { max, .. }) => max,
        (RoleFilter::MPmin, PredRole::Mapping { min, .. }) => min,
        _ => false,
    }
}

/// The facts of `m` whose predicate has the requested role.
pub fn project(m: &Interpretation, filter: RoleFilter, roles: &Roles) -> Result<Interpretation, RoleResolutionError> {
    let mut out = Interpretation::new();
    for a in m {
        let role = roles.get(&a.key()).ok_or_else(|| RoleResolutionError(a.key()))?;
        if role_matches(role, filter) {
            out.insert(a.clone());
        }
    }
    Ok(out)
}

/// Like [`project`] but silently skips undeclared predicates.
pub(crate) fn project_lenient(m: &Interpretation, filter: RoleFilter, roles: &Roles) -> Interpretation {
    m.filter(|a| roles.get(&a.key()).is_some_and(|r| role_matches(r, filter)))
}
