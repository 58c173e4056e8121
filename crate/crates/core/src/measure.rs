/// A finite probability measure: weighted point masses with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMeasure<P> {
    points: Vec<P>,
    weights: Vec<f64>,
}

impl<P> NodeMeasure<P> {
    /// Builds a measure from unnormalized non-negative masses.
    ///
    /// Returns `None` if the lengths differ, any mass is negative or non-finite,
    /// or the total mass is zero.
    pub fn from_masses(points: Vec<P>, masses: Vec<f64>) -> Option<Self> {
        if points.len() != masses.len() || points.is_empty() {
            return None;
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return None;
        }
        let total = neumaier_sum(masses.iter().copied());
        if !(total > 0.0) {
            return None;
        }
        let weights = masses.into_iter().map(|m| m / total).collect();
        Some(Self { points, weights })
    }

    /// Equal weights `1/n`.
    pub fn uniform(points: Vec<P>) -> Option<Self> {
        if points.is_empty() {
            return None;
        }
        let w = 1.0 / points.len() as f64;
        let weights = vec![w; points.len()];
        Some(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, f64)> + '_ {
        self.points.iter().zip(self.weights.iter().copied())
    }

    pub fn total_weight(&self) -> f64 {
        neumaier_sum(self.weights.iter().copied())
    }

    /// Integral of `f` against the measure.
    pub fn expectation(&self, f: impl Fn(&P) -> f64) -> f64 {
        neumaier_sum(self.iter().map(|(p, w)| w * f(p)))
    }

    /// Mass of the set `{p : pred(p)}`.
    pub fn mass_where(&self, pred: impl Fn(&P) -> bool) -> f64 {
        neumaier_sum(self.iter().filter(|(p, _)| pred(p)).map(|(_, w)| w))
    }

    pub fn map<Q>(self, f: impl FnMut(P) -> Q) -> NodeMeasure<Q> {
        NodeMeasure {
            points: self.points.into_iter().map(f).collect(),
            weights: self.weights,
        }
    }
}

/// Compensated summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
