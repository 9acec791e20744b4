use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};

/// A finite instance space. Atoms are the indices `0..size`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Universe {
    size: usize,
    labels: Option<Arc<[String]>>,
}

impl Universe {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(domain("universe must contain at least one atom"));
        }
        Ok(Universe { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(domain("universe must contain at least one atom"));
        }
        Ok(Universe {
            size: labels.len(),
            labels: Some(labels.into()),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of an atom, falling back to its index.
    pub fn label(&self, atom: usize) -> String {
        match &self.labels {
            Some(l) if atom < l.len() => l[atom].clone(),
            _ => atom.to_string(),
        }
    }

    pub fn contains(&self, atom: usize) -> bool {
        atom < self.size
    }

    pub(crate) fn check_atom(&self, atom: usize) -> Result<()> {
        if atom < self.size {
            Ok(())
        } else {
            Err(domain(format!(
                "atom {atom} outside universe of size {}",
                self.size
            )))
        }
    }

    pub(crate) fn ensure_same(&self, other: &Universe) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::UniverseMismatch {
                left: self.size,
                right: other.size,
            })
        }
    }
}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.labels {
            None => write!(f, "Universe({})", self.size),
            Some(_) => write!(f, "Universe({}, labelled)", self.size),
        }
    }
}
