use super::TransducerError;

/// Decay used for the inference-time weight average.
pub const DEFAULT_EMA_DECAY: f64 = 0.999_999;

/// Exponential moving average of a parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmaState {
    shadow: Vec<f64>,
    decay: f64,
}

impl EmaState {
    pub fn new(initial: Vec<f64>, decay: f64) -> Result<Self, TransducerError> {
        if !(0.0..=1.0).contains(&decay) {
            return Err(TransducerError::InvalidParameter(format!("EMA decay must lie in [0, 1], got {decay}")));
        }
        if initial.iter().any(|x| !x.is_finite()) {
            return Err(TransducerError::InvalidParameter("EMA shadow must be finite".into()));
        }
        Ok(EmaState { shadow: initial, decay })
    }

    pub fn shadow(&self) -> &[f64] {
        &self.shadow
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// `shadow ← decay·shadow + (1 − decay)·params`
    pub fn update(&mut self, params: &[f64]) -> Result<(), TransducerError> {
        if params.len() != self.shadow.len() {
            return Err(TransducerError::DimensionMismatch { expected: self.shadow.len(), found: params.len() });
        }
        let d = self.decay;
        for (s, &p) in self.shadow.iter_mut().zip(params) {
            *s = d * *s + (1.0 - d) * p;
        }
        Ok(())
    }
}
