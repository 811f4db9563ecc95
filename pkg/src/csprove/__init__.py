"""Decision procedure for the bimodal provability logic CS."""
