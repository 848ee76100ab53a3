// placeholder — implementation pending
