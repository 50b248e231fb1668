#pragma once

namespace fabric3d {

struct ArchSpec;

// All values in picoseconds.
struct DelayModel
{
    double base_switch_ps = 0;
    double wire_per_tile_ps = 0;
    double vertical_ps = 0;
    double lut_ps = 0;
    double setup_ps = 0;

    static DelayModel from_spec(const ArchSpec &spec);
    // Vertical hop delay expressed as a multiple of the base switch delay.
    DelayModel with_vertical_ratio(double ratio) const
    {
        DelayModel m = *this;
        m.vertical_ps = ratio * base_switch_ps;
        return m;
    }
};

} // namespace fabric3d
