namespace nsf::detail { int placeholder_config = 0; }
