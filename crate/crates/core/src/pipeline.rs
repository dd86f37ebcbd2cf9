//! One (q, N) point end to end: quasi-1D cubic, cubic-quintic, full 3D,
//! Schmidt model and comparison.

use crate::analysis::AnalysisReport;
use crate::error::Result;
use crate::grids::{CylGrid, GridSpec};
use crate::schmidt::SchmidtModel;
use crate::solvers::{
    solve_gp1d, solve_gp3d, solve_quintic_from, GroundState1D, GroundState3D, InitialGuess,
    SolveSettings,
};
use crate::units::Condensate;

#[derive(Debug, Clone)]
pub struct PointSolution {
    pub condensate: Condensate,
    pub grid: CylGrid,
    pub cubic: GroundState1D,
    pub quintic: GroundState1D,
    pub full: GroundState3D,
    pub model: SchmidtModel,
    pub report: AnalysisReport,
}

/// The 3D flow starts from ξ₀₀ φ₀₀, whatever guess `settings` carries.
pub fn solve_point(
    cond: &Condensate,
    spec: &GridSpec,
    settings: &SolveSettings,
) -> Result<PointSolution> {
    let grid = spec.cylindrical(cond)?;
    let cubic = solve_gp1d(cond, &grid.axial, settings)?;
    let quintic = solve_quintic_from(cond, &cubic, settings)?;
    let full = solve_gp3d(
        cond,
        &grid,
        &settings.with_guess(InitialGuess::Provided(cubic.phi.values.clone())),
    )?;
    let model = SchmidtModel::build(cond, &cubic, &quintic, &grid.radial)?;
    let report = AnalysisReport::build(cond, &cubic, &full, &model)?;
    Ok(PointSolution {
        condensate: *cond,
        grid,
        cubic,
        quintic,
        full,
        model,
        report,
    })
}
