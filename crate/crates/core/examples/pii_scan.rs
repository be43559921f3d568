//! Scan text for PII and print masked and labelled redactions.
use mailsleuth::pii::{redact, scan_document, DetectorSet, RedactStyle};

fn main() {
    let text = "Call 713-853-6000 about SSN 078-05-1120. Card 4111 1111 1111 1111, \
                passport number X12345678, wire to GB82 WEST 1234 5698 7654 32 by 5/14/2001.";
    let det = DetectorSet::default();
    let findings = scan_document(text, &det);
    for f in &findings {
        println!("{:<16} {:<30} validated={}", f.category.name(), f.matched, f.validated);
    }
    println!("\n{}", redact(text, &findings, RedactStyle::Mask));
    println!("{}", redact(text, &findings, RedactStyle::Label));
}
