use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::matrix::Matrix;
use super::tape::{Tape, Var};

/// Ordered collection of named trainable arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ParamSet {
    entries: Vec<NamedParam>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedParam {
    pub name: String,
    pub value: Matrix,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a parameter and returns its slot index.
    pub fn push(&mut self, name: impl Into<String>, value: Matrix) -> usize {
        self.entries.push(NamedParam {
            name: name.into(),
            value,
        });
        self.entries.len() - 1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[NamedParam] {
        &self.entries
    }

    pub fn name(&self, i: usize) -> &str {
        &self.entries[i].name
    }

    pub fn value(&self, i: usize) -> &Matrix {
        &self.entries[i].value
    }

    pub fn value_mut(&mut self, i: usize) -> &mut Matrix {
        &mut self.entries[i].value
    }

    pub fn get(&self, name: &str) -> Option<&Matrix> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| &e.value)
    }

    pub fn scalar_count(&self) -> usize {
        self.entries.iter().map(|e| e.value.len()).sum()
    }

    /// Records every parameter as a trainable leaf on `tape`, in slot order.
    pub fn bind(&self, tape: &mut Tape) -> Vec<Var> {
        self.entries
            .iter()
            .map(|e| tape.leaf(e.value.clone()))
            .collect()
    }

    /// Zero-filled arrays matching every parameter's shape.
    pub fn zeros_like(&self) -> Vec<Matrix> {
        self.entries
            .iter()
            .map(|e| Matrix::zeros(e.value.rows(), e.value.cols()))
            .collect()
    }

    /// Checks the shapes against an expected `(name, shape)` layout.
    pub fn check_layout(&self, expected: &[(String, [usize; 2])]) -> Result<()> {
        for (name, shape) in expected {
            let Some(found) = self.get(name) else {
                return Err(Error::Config(format!("missing parameter `{name}`")));
            };
            if found.shape() != *shape {
                return Err(Error::Config(format!(
                    "parameter `{name}` has shape {:?}, expected {:?}",
                    found.shape(),
                    shape
                )));
            }
        }
        if let Some(extra) = self
            .entries
            .iter()
            .find(|e| !expected.iter().any(|(n, _)| *n == e.name))
        {
            return Err(Error::Config(format!(
                "unexpected parameter `{}`",
                extra.name
            )));
        }
        Ok(())
    }
}
