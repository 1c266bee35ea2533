//! Binary classification metrics with hoax as the positive class.

use alloc::format;
use alloc::string::String;

use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[cfg_attr(feature = "serde", serde(rename = "fn"))]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// The same matrix seen with the other class as positive.
    pub fn flipped(&self) -> Self {
        Self {
            tp: self.tn,
            fp: self.fn_,
            tn: self.tp,
            fn_: self.fp,
        }
    }
}

pub fn confusion(predictions: &[Label], gold: &[Label]) -> Result<ConfusionMatrix> {
    if predictions.len() != gold.len() {
        return Err(Error::argument(format!(
            "{} predictions for {} gold labels",
            predictions.len(),
            gold.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::argument("nothing to evaluate"));
    }
    let mut m = ConfusionMatrix::default();
    for (&p, &g) in predictions.iter().zip(gold) {
        match (p, g) {
            (Label::Hoax, Label::Hoax) => m.tp += 1,
            (Label::Hoax, Label::Legitimate) => m.fp += 1,
            (Label::Legitimate, Label::Legitimate) => m.tn += 1,
            (Label::Legitimate, Label::Hoax) => m.fn_ += 1,
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision, recall and F1 of class `positive`; 0/0 evaluates to 0.
pub fn prf(matrix: &ConfusionMatrix, positive: Label) -> Prf {
    let m = match positive {
        Label::Hoax => *matrix,
        Label::Legitimate => matrix.flipped(),
    };
    let precision = ratio(m.tp, m.tp + m.fp);
    let recall = ratio(m.tp, m.tp + m.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Prf { precision, recall, f1 }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerClass {
    pub hoax: Prf,
    pub legitimate: Prf,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub setting: String,
    pub per_class: PerClass,
    pub macro_f1: f64,
    pub matrix: ConfusionMatrix,
}

impl EvalReport {
    pub fn from_matrix(setting: impl Into<String>, matrix: ConfusionMatrix) -> Self {
        let hoax = prf(&matrix, Label::Hoax);
        let legitimate = prf(&matrix, Label::Legitimate);
        Self {
            setting: setting.into(),
            macro_f1: (hoax.f1 + legitimate.f1) / 2.0,
            per_class: PerClass { hoax, legitimate },
            matrix,
        }
    }
}

pub fn evaluate(setting: impl Into<String>, predictions: &[Label], gold: &[Label]) -> Result<EvalReport> {
    Ok(EvalReport::from_matrix(setting, confusion(predictions, gold)?))
}
