//! Linear-interpolation stabilization of rolling-origin forecasts.
//!
//! Vertical stabilization pulls each forecast towards the forecast made for
//! the same target at the previous origin. Horizontal stabilization pulls
//! each horizon towards the previous horizon of the same origin, which
//! flattens the path towards the H1 anchor. In both directions `w` is the
//! weight on the previous value:
//!
//! ```text
//! stable = w * previous + (1 - w) * current
//! ```
//!
//! Partial interpolation takes `previous` from the original forecasts, full
//! interpolation from the already stabilized ones, so full interpolation
//! chains every earlier origin (or horizon) into the result.
//!
//! Cells that have no predecessor are copied verbatim: the first origin and
//! the last horizon of every origin (vertical), and H1 (horizontal).

use crate::error::{check_weight, Error, Result};
use crate::types::{Direction, ForecastMatrix, Method, StabilizationSpec};

#[inline]
fn blend(w: f64, previous: f64, current: f64) -> f64 {
    w * previous + (1.0 - w) * current
}

/// Vertically stabilizes a forecast matrix across origins.
pub fn stabilize_vertical(matrix: &ForecastMatrix, w: f64, method: Method) -> Result<ForecastMatrix> {
    check_weight(w)?;
    if matrix.origins() == 0 || matrix.horizon() == 0 {
        return Err(Error::Shape(format!(
            "series {}: cannot stabilize an empty matrix",
            matrix.series_id()
        )));
    }
    if w == 0.0 {
        return Ok(matrix.clone());
    }
    let original = matrix.rows();
    let h = matrix.horizon();
    let mut stable: Vec<Vec<f64>> = Vec::with_capacity(original.len());
    stable.push(original[0].clone());
    for i in 1..original.len() {
        let previous = match method {
            Method::Partial => &original[i - 1],
            Method::Full => &stable[i - 1],
        };
        let mut row = original[i].clone();
        for j in 0..h - 1 {
            row[j] = blend(w, previous[j + 1], original[i][j]);
        }
        stable.push(row);
    }
    Ok(matrix.with_rows(stable))
}

/// Horizontally stabilizes one origin's forecasts towards its H1 value.
pub fn stabilize_horizontal(row: &[f64], w: f64, method: Method) -> Result<Vec<f64>> {
    check_weight(w)?;
    if row.is_empty() {
        return Err(Error::Shape("cannot stabilize an empty forecast vector".into()));
    }
    let mut stable = row.to_vec();
    if w == 0.0 {
        return Ok(stable);
    }
    for j in 1..row.len() {
        let previous = match method {
            Method::Partial => row[j - 1],
            Method::Full => stable[j - 1],
        };
        stable[j] = blend(w, previous, row[j]);
    }
    Ok(stable)
}

/// Applies [`stabilize_horizontal`] to every origin of a matrix.
pub fn stabilize_horizontal_matrix(matrix: &ForecastMatrix, w: f64, method: Method) -> Result<ForecastMatrix> {
    if matrix.origins() == 0 {
        return Err(Error::Shape(format!(
            "series {}: cannot stabilize an empty matrix",
            matrix.series_id()
        )));
    }
    let rows = matrix
        .rows()
        .iter()
        .map(|r| stabilize_horizontal(r, w, method))
        .collect::<Result<Vec<_>>>()?;
    Ok(matrix.with_rows(rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointOrder {
    VerticalThenHorizontal,
    HorizontalThenVertical,
}

/// Sequential joint stabilization with separate vertical and horizontal
/// weights; both stages use the same method.
pub fn stabilize_joint(
    matrix: &ForecastMatrix,
    w_vertical: f64,
    w_horizontal: f64,
    order: JointOrder,
    method: Method,
) -> Result<ForecastMatrix> {
    check_weight(w_vertical)?;
    check_weight(w_horizontal)?;
    match order {
        JointOrder::VerticalThenHorizontal => {
            let v = stabilize_vertical(matrix, w_vertical, method)?;
            stabilize_horizontal_matrix(&v, w_horizontal, method)
        }
        JointOrder::HorizontalThenVertical => {
            let h = stabilize_horizontal_matrix(matrix, w_horizontal, method)?;
            stabilize_vertical(&h, w_vertical, method)
        }
    }
}

/// Dispatches on a [`StabilizationSpec`]. Horizontal and joint directions
/// operate on the raw forecasts; the remainder pipeline lives in
/// [`crate::pipeline`].
pub fn apply(matrix: &ForecastMatrix, spec: &StabilizationSpec) -> Result<ForecastMatrix> {
    match spec.direction {
        Direction::Vertical => stabilize_vertical(matrix, spec.weight, spec.method),
        Direction::Horizontal => stabilize_horizontal_matrix(matrix, spec.weight, spec.method),
        Direction::JointVh | Direction::JointHv => {
            let order = if spec.direction == Direction::JointVh {
                JointOrder::VerticalThenHorizontal
            } else {
                JointOrder::HorizontalThenVertical
            };
            let w2 = spec.secondary_weight.unwrap_or(spec.weight);
            stabilize_joint(matrix, spec.weight, w2, order, spec.method)
        }
    }
}

/// Opt-in post-step for count data: replaces negative forecasts with zero.
pub fn clamp_nonnegative(matrix: &ForecastMatrix) -> ForecastMatrix {
    matrix.with_rows(
        matrix
            .rows()
            .iter()
            .map(|r| r.iter().map(|v| v.max(0.0)).collect())
            .collect(),
    )
}
