pub mod census;
pub mod estimate;
pub mod eval;
pub mod mixup;
pub mod sample;
