pub mod pmf;
pub mod reports;
pub mod simulate;
pub mod tick;
pub mod verify;
