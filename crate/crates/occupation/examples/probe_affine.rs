use loopsoup_core::{harmonic_pair, GeneratorSpec, RadonMeasure};

fn main() {
    let gen = GeneratorSpec::<f64>::brownian_with_killing(
        RadonMeasure::from_atoms(vec![(-0.5, 1.0), (0.5, 1.0)]).unwrap(),
    )
    .unwrap();
    let hs = harmonic_pair(&gen).unwrap();
    let (a, b) = (2.0, 3.0);
    let image = gen.affine_image(a, b).unwrap();
    let hs_img = harmonic_pair(&image).unwrap();
    let x = 0.3_f64;
    let y = a * x + b;
    println!("G(x,x)       = {:.12}", hs.green(x, x));
    println!("G_img(y,y)   = {:.12}", hs_img.green(y, y));
    println!("ratio        = {:.12}", hs_img.green(y, y) / hs.green(x, x));
    println!("image m at y = {}", image.m.at(y));
    println!("image w at y = {}", image.w.at(y));
    println!("image kappa atoms = {:?}", image.kappa.atoms());
    println!("u_up img(y)={:.9} u_down img(y)={:.9}", hs_img.u_up(y), hs_img.u_down(y));
    println!("u_up (x)={:.9} u_down (x)={:.9}", hs.u_up(x), hs.u_down(x));
}
