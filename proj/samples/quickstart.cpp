// Trains a small de-aliasing model on random phantoms and compares it with
// the zero-filled input on a held-out Shepp-Logan image.

#include <iostream>
#include <vector>

#include "rodeo/rodeo.hpp"

int main() {
    using namespace rodeo;

    const DegradationSpec spec{MriDegradation{MaskKind::random, {}}, 7};
    SeededRng rng(0);
    std::vector<ImageGrid> clean;
    for (int i = 0; i < 24; ++i) clean.push_back(generate_random_phantom(64, rng));
    const TrainingSet set = build_training_set(clean, spec, 32);

    TrainConfig config;
    config.hidden = 128;
    config.max_iter = 30;
    config.p4 = LatentUpdate::paper_literal;
    const RobustTrainingResult trained = train_robust(set, config);

    const ImageGrid truth = generate_phantom(PhantomKind::shepp_logan, 64);
    const ImageGrid aliased = degrade(truth, spec);
    const ImageGrid restored = reconstruct_image(trained.model, aliased, false);

    std::cout << "iterations " << trained.state.iteration << "\n"
              << "zero-filled nmse " << nmse(aliased, truth) << "\n"
              << "rodeo nmse       " << nmse(restored, truth) << "\n";
    write_pgm("quickstart_aliased.pgm", aliased);
    write_pgm("quickstart_restored.pgm", restored);
}
