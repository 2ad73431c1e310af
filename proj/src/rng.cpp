#include "supres/rng.hpp"

namespace supres {

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept
{
    return mix64(mix64(root) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index, StreamTag tag) noexcept
{
    return mix64(derive_seed(root, index) + 0xd1b54a32d192ed03ULL * static_cast<std::uint64_t>(tag));
}

} // namespace supres
