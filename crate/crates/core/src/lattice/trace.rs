use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::lattice::LatticeOperator;
use crate::C64;

/// Nested boxes of strictly increasing size used for trace-per-volume limits.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxSequence {
    boxes: Vec<Rect>,
}

impl BoxSequence {
    pub fn new(boxes: Vec<Rect>) -> Result<Self> {
        if boxes.is_empty() || boxes.iter().any(Rect::is_empty) {
            return Err(Error::InvalidArgument("box sequence needs non-empty boxes".into()));
        }
        for pair in boxes.windows(2) {
            if pair[1].len() <= pair[0].len() || !pair[1].contains_rect(&pair[0]) {
                return Err(Error::InvalidArgument(format!(
                    "boxes must be nested with strictly increasing size: {:?} then {:?}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(BoxSequence { boxes })
    }

    /// Squares `[c - h, c + h]^2` around the window center for each half width `h`.
    pub fn concentric(window: Rect, half_widths: &[usize]) -> Result<Self> {
        let c = window.center();
        let boxes: Vec<Rect> = half_widths
            .iter()
            .map(|&h| Rect::new(c.0 - h as i64, c.1 - h as i64, 2 * h + 1, 2 * h + 1))
            .collect();
        if let Some(b) = boxes.iter().find(|b| !window.contains_rect(b)) {
            return Err(Error::InvalidArgument(format!("box {b:?} does not fit in window {window:?}")));
        }
        Self::new(boxes)
    }

    /// The whole window as a single box.
    pub fn whole(window: Rect) -> Self {
        BoxSequence { boxes: vec![window] }
    }

    /// Concentric squares at a quarter, half, three quarters and all of the
    /// largest centered square of the window.
    pub fn default_for(window: Rect) -> Self {
        let h = (window.width.min(window.height).max(1) - 1) / 2;
        let mut halves: Vec<usize> = [h / 4, h / 2, (3 * h) / 4, h].to_vec();
        halves.dedup();
        Self::concentric(window, &halves).expect("centered squares fit in their window")
    }

    pub fn boxes(&self) -> &[Rect] {
        &self.boxes
    }

    pub fn largest(&self) -> Rect {
        *self.boxes.last().expect("box sequences are non-empty")
    }
}

/// Trace per unit volume with its convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEstimate {
    /// Average over the largest box.
    pub value: C64,
    /// `(box, average)` for every box of the sequence.
    pub sequence: Vec<(Rect, C64)>,
}

/// `(1/|L_i|) sum_{n in L_i} <n|a|n>` along the box sequence.
pub fn trace_per_unit_volume(a: &LatticeOperator, boxes: &BoxSequence) -> TraceEstimate {
    let sequence: Vec<(Rect, C64)> = boxes
        .boxes()
        .iter()
        .map(|b| {
            let s: C64 = b.sites().map(|n| a.diagonal_entry(n)).sum();
            (*b, s / b.len() as f64)
        })
        .collect();
    TraceEstimate { value: sequence.last().expect("non-empty").1, sequence }
}
