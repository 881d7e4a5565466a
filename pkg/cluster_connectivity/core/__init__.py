"""Graph model, min cuts, treatments, description length, inference, metrics."""
