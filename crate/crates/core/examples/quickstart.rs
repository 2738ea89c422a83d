use roseland::datasets::{pick_landmarks, sample_circle, DensitySpec, LandmarkSource};
use roseland::eval::{circular_rank_correlation, phase_amplitude};
use roseland::{roseland_embed, EmbedderConfig, Rng};

fn main() -> roseland::Result<()> {
    let mut rng = Rng::new(0);
    let sample = sample_circle(2500, &DensitySpec::Uniform, 2, &mut rng)?;
    let landmarks = pick_landmarks(LandmarkSource::RandomSubset(&sample.points), 50, &mut rng)?;

    let cfg = EmbedderConfig::default().with_embed_dim(3).with_diffusion_time(1.0);
    let result = roseland_embed(&sample.points, &landmarks.points, &cfg)?;
    println!("spectrum: {:?}", result.spectrum);

    let pa = phase_amplitude(&result.coords.column(0), &result.coords.column(1), &sample.angles)?;
    let rho = circular_rank_correlation(&pa.phase, &pa.angles)?;
    println!("circular rank correlation: {rho:.4}");
    Ok(())
}
