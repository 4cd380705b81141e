#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rearrange/env.hpp"
#include "rearrange/raster.hpp"

namespace rearrange {

/// One trajectory: observations o_0..o_T and actions a_0..a_{T-1}.
struct Episode {
    std::vector<Raster> observations;
    std::vector<Action> actions;
    // Ground-truth index of the object each action moved (-1 if none).
    // Filled by the generator; not part of the file format.
    std::vector<int> moved;

    std::size_t transition_count() const { return actions.size(); }
};

struct ExperienceBuffer {
    EnvConfig env;
    std::uint64_t seed = 0;
    std::vector<Episode> episodes;

    std::size_t transition_count() const;
    /// Content hash of the serialised form.
    std::string digest() const;
    /// Leading `fraction` of episodes (at least one).
    ExperienceBuffer prefix(double fraction) const;
};

// Layout (little endian):
//   "NCSB" u32 version=1
//   u32 header length, header text (env config key = value lines plus seed)
//   u32 episode count
//   per episode: u32 T, then T x (raster o_t, 4 x f64 action w.x w.y dw.x dw.y), then raster o_T
// Rasters use the NCSR encoding.
void write_buffer(std::ostream& out, const ExperienceBuffer& buffer);
ExperienceBuffer read_buffer(std::istream& in);

void save_buffer(const std::string& path, const ExperienceBuffer& buffer);
ExperienceBuffer load_buffer(const std::string& path);

}  // namespace rearrange
