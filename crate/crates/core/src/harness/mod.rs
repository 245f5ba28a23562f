pub mod acceptance;
pub mod csv;
pub mod data;
pub mod oracle;
pub mod reference;
pub mod spec;
pub mod studies;
