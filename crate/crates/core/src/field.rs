//! Grid-sampled basic functions: the common currency of every operation.

use std::sync::Arc;

use crate::error::{Result, SptError};
use crate::exec;
use crate::geometry::SasakiModel;

/// A Reeb-invariant function sampled on a model grid.
#[derive(Debug, Clone)]
pub struct BasicFunction {
    model: Arc<SasakiModel>,
    data: Vec<f64>,
    pub label: String,
    pub seed: Option<u64>,
}

impl BasicFunction {
    pub fn new(model: &Arc<SasakiModel>, data: Vec<f64>) -> Result<BasicFunction> {
        if data.len() != model.len() {
            return Err(SptError::BadGrid(format!(
                "function has {} samples, model expects {}",
                data.len(),
                model.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(SptError::InvalidArgument(format!("non-finite sample at index {i}")));
        }
        Ok(BasicFunction { model: Arc::clone(model), data, label: String::new(), seed: None })
    }

    /// Sample `f` at the background coordinates of each node.
    pub fn from_fn<F>(model: &Arc<SasakiModel>, f: F) -> BasicFunction
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        BasicFunction { model: Arc::clone(model), data: model.sample(f), label: String::new(), seed: None }
    }

    pub fn constant(model: &Arc<SasakiModel>, c: f64) -> BasicFunction {
        BasicFunction { model: Arc::clone(model), data: vec![c; model.len()], label: format!("const({c})"), seed: None }
    }

    pub fn zero(model: &Arc<SasakiModel>) -> BasicFunction {
        BasicFunction::constant(model, 0.0)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> BasicFunction {
        self.label = label.into();
        self
    }

    pub fn model(&self) -> &Arc<SasakiModel> {
        &self.model
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Same model check for binary operations.
    pub fn same_model(&self, other: &BasicFunction) -> Result<()> {
        if Arc::ptr_eq(&self.model, &other.model) || self.data.len() == other.data.len() {
            Ok(())
        } else {
            Err(SptError::ModelMismatch)
        }
    }

    fn derived(&self, data: Vec<f64>, label: String) -> BasicFunction {
        BasicFunction { model: Arc::clone(&self.model), data, label, seed: None }
    }

    pub fn map<F>(&self, f: F) -> BasicFunction
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let d = &self.data;
        self.derived(exec::collect(d.len(), |i| f(d[i])), self.label.clone())
    }

    pub fn zip<F>(&self, other: &BasicFunction, f: F) -> BasicFunction
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        assert_eq!(self.len(), other.len(), "grid size mismatch");
        let (a, b) = (&self.data, &other.data);
        self.derived(exec::collect(a.len(), |i| f(a[i], b[i])), String::new())
    }

    pub fn add_const(&self, c: f64) -> BasicFunction {
        let mut out = self.map(|x| x + c);
        out.label = format!("{}+{c}", self.label);
        out
    }

    pub fn scale(&self, s: f64) -> BasicFunction {
        self.map(|x| s * x)
    }

    /// `a·self + b·other`.
    pub fn lin(&self, a: f64, other: &BasicFunction, b: f64) -> BasicFunction {
        self.zip(other, |x, y| a * x + b * y)
    }

    pub fn sub(&self, other: &BasicFunction) -> BasicFunction {
        self.zip(other, |x, y| x - y)
    }

    pub fn add(&self, other: &BasicFunction) -> BasicFunction {
        self.zip(other, |x, y| x + y)
    }

    pub fn max_with(&self, other: &BasicFunction) -> BasicFunction {
        self.zip(other, f64::max)
    }

    pub fn min_with(&self, other: &BasicFunction) -> BasicFunction {
        self.zip(other, f64::min)
    }

    pub fn sup(&self) -> f64 {
        let d = &self.data;
        exec::max(d.len(), |i| if self.model.active(i) { d[i] } else { f64::NEG_INFINITY })
    }

    pub fn inf(&self) -> f64 {
        let d = &self.data;
        exec::min(d.len(), |i| if self.model.active(i) { d[i] } else { f64::INFINITY })
    }

    /// `sup |self − other|` over active nodes.
    pub fn sup_dist(&self, other: &BasicFunction) -> f64 {
        let (a, b) = (&self.data, &other.data);
        exec::max(a.len(), |i| if self.model.active(i) { (a[i] - b[i]).abs() } else { 0.0 })
    }

    /// `∫ f(u) (ω^T)^n ∧ η`.
    pub fn integrate_ref<F>(&self, f: F) -> f64
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let d = &self.data;
        let w = self.model.ref_weights();
        exec::sum(d.len(), |i| if w[i] != 0.0 { f(d[i]) * w[i] } else { 0.0 })
    }

    /// Reference-volume average.
    pub fn mean(&self) -> f64 {
        self.integrate_ref(|x| x) / self.model.volume()
    }
}
