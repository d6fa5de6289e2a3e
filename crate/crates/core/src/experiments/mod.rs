//! End-to-end protocols built from the lower layers: controlled-rotation
//! interferometry, swap-generated entanglement, the vacuum-correlator
//! exchange argument on a toy Fock space, and finite-difference checks of
//! the rotating-frame gravitomagnetic fields.

mod correlator;
mod entangle;
mod gravito;
mod interferometer;

pub use correlator::{
    correlator_chain_check, correlator_table, ChainVerdict, CorrelatorReport, ToyFockModel,
};
pub use entangle::{
    alpha_grid, beamsplitter_entanglement, entanglement_sweep, EntanglementSweepPoint,
};
pub use gravito::{
    curl_central, gravito_curl_check, gravito_efield_check, CurlReport, EFieldReport, CURL_POINTS,
    CURL_SEED,
};
pub use interferometer::{
    controlled_rotation_interferometer, interferometer_with_state, InterferometerReport,
    TransportModel,
};
