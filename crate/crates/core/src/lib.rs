pub mod bargmann;
pub mod jc_dispersive;
pub mod lindblad;
pub mod numdiff;
pub mod params;
pub mod rabi;
pub mod residuals;
pub mod scenario;
pub mod verify;
