#include "hoikit/refine/refine.h"

#include "hoikit/render/hoi.h"
#include "hoikit/render/png.h"

namespace hoikit::refine {

RefineResult refine_translation(const hoiopt::HoiScene& scene, const hoiopt::HoiParams& params, Selector& selector,
                                const RefineOptions& options) {
  RefineResult out;
  out.candidates = candidate_grid(params.translation, options.eta);
  out.penetration = candidate_penetration(out.candidates, scene, params);
  std::vector<double> semantic;
  if (options.scorer)
    for (std::size_t i = 0; i < out.candidates.size(); ++i)
      semantic.push_back(options.scorer(i, out.candidates.translations[i]));
  out.survivors = rank_candidates(out.penetration, semantic, options.keep);

  const bool images = options.render || selector.needs_images();
  out.camera = render::hoi_camera(scene, params, options.image_size, options.image_size);
  for (const auto& s : out.survivors) {
    Candidate c;
    c.id = s.id;
    c.translation = out.candidates.translations[s.id];
    c.penetration = s.penetration;
    if (images) {
      hoiopt::HoiParams p = params;
      p.translation = c.translation;
      c.png = render::encode_png(render::render_hoi(scene, p, out.camera));
    }
    out.shown.push_back(std::move(c));
  }
  out.tournament = tournament_select(out.shown, selector, options.batch);
  out.translation = out.candidates.translations[out.tournament.winner];
  return out;
}

}  // namespace hoikit::refine
